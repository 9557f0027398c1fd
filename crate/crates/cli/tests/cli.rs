use std::path::Path;
use std::process::{Command, Output};

use rnm_core::trace::read_csv;
use rnm_core::{Complex, RootSet};
use serde_json::Value;

fn rnm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn point(v: &Value) -> Complex {
    Complex::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn solve_converges_from_two() {
    let out = rnm(&["solve", "--coeffs=-1,0,1", "--seed=2", "--eps=1e-10"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((point(&v["z"]) - Complex::new(1.0, 0.0)).norm() < 1e-9);
    assert_eq!(v["termination"], "RootTolerance");
    assert!(v["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn solve_plain_stops_at_critical_point() {
    let out = rnm(&[
        "solve",
        "--coeffs=-1,0,1",
        "--seed=0.3i",
        "--eps=1e-6",
        "--method=plain",
    ]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["termination"], "ProductTolerance");
    assert!(point(&v["z"]).norm() < 1e-5);
}

#[test]
fn solve_at_root_takes_no_steps() {
    let out = rnm(&["solve", "--coeffs=-1,0,1", "--seed=1", "--eps=1e-10"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["iters"], 0);
}

#[test]
fn solve_methods_and_exit_codes() {
    let out = rnm(&[
        "solve",
        "--coeffs=2,-2,0,1",
        "--seed=0",
        "--method=newton",
        "--max-iters=20",
    ]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["termination"], "MaxIters");

    let out = rnm(&["solve", "--coeffs=-1,0,1", "--seed=0", "--method=newton"]);
    assert_eq!(code(&out), 2);

    for extra in [&[][..], &["--greedy-compare"][..]] {
        let mut args = vec!["solve", "--coeffs=2,-2,0,1", "--seed=-3", "--method=hybrid"];
        args.extend_from_slice(extra);
        let out = rnm(&args);
        assert_eq!(code(&out), 0);
        assert!((point(&json(&out)["z"]) - Complex::new(-1.7692923542, 0.0)).norm() < 1e-8);
    }

    let out = rnm(&[
        "solve",
        "--coeffs=-1,0,1",
        "--seed=3",
        "--method=plain",
        "--amplitude-refresh=10",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn parse_errors_exit_one() {
    for args in [
        &["solve", "--coeffs=1,x"][..],
        &["solve"][..],
        &["solve", "--coeffs=0,0"][..],
        &["solve", "--coeffs=-1,0,1", "--seed=1+"][..],
        &["solve", "--coeffs=-1,0,1", "--eps=2"][..],
        &["render", "--coeffs=-1,0,1", "--size=12"][..],
    ] {
        let out = rnm(args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn eval_reports_taylor_table() {
    let out = rnm(&["eval", "--coeffs=-1,0,1", "--seed=1+i"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(point(&v["value"]), Complex::new(-1.0, 2.0));
    assert_eq!(point(&v["derivative"]), Complex::new(2.0, 2.0));
    assert_eq!(v["taylor"].as_array().unwrap().len(), 3);
}

#[test]
fn roots_of_smale_cubic_round_trip() {
    let out = rnm(&["roots", "--coeffs=2,-2,0,1", "--eps=1e-8"]);
    assert_eq!(code(&out), 0);
    let set: RootSet = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(set.len(), 3);
    let (_, dist) = set.nearest(Complex::new(-1.76929, 0.0)).unwrap();
    assert!(dist < 1e-5);
    assert!(set.residuals.iter().all(|&r| r <= 1e-8));
}

#[test]
fn roots_from_poly_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(
        &path,
        r#"{"coeffs": [[24,0],[-50,0],[35,0],[-10,0],[1,0]]}"#,
    )
    .unwrap();
    let out = rnm(&["roots", "--poly-file", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let set: RootSet = serde_json::from_slice(&out.stdout).unwrap();
    for r in 1..=4 {
        assert!(set.nearest(Complex::new(r as f64, 0.0)).unwrap().1 < 1e-8);
    }

    let text = dir.path().join("p.txt");
    std::fs::write(&text, "-1,0,1\n").unwrap();
    assert_eq!(
        code(&rnm(&["roots", "--poly-file", text.to_str().unwrap()])),
        0
    );

    let both = rnm(&[
        "roots",
        "--coeffs=-1,0,1",
        "--poly-file",
        text.to_str().unwrap(),
    ]);
    assert_eq!(code(&both), 1);
}

#[test]
fn roots_reports_partial_result_on_failure() {
    let out = rnm(&["roots", "--coeffs=1,2,3,4,5,6,7", "--max-iters=1"]);
    assert_eq!(code(&out), 4);
    let set: RootSet = serde_json::from_slice(&out.stdout).unwrap();
    assert!(set.len() <= 6);
}

#[test]
fn trace_first_iterate_is_minus_one_ninth() {
    let out = rnm(&["trace", "--coeffs=-1,0,1", "--seed=0", "--eps=1e-6"]);
    assert_eq!(code(&out), 0);
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows[1].t, 1);
    assert!((rows[1].point.re + 1.0 / 9.0).abs() < 1e-16);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let out = rnm(&[
        "trace",
        "--coeffs=-1,0,1",
        "--seed=0.3i",
        "--eps=1e-6",
        "--method=plain",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let rows = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.point.re == 0.0));
    assert!(rows.windows(2).all(|w| w[1].f < w[0].f));
}

fn render(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["render", "--output", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    rnm(&args)
}

#[test]
fn render_writes_ppm() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basins.ppm");
    let out = render(
        &path,
        &["--coeffs=-1,0,0,1", "--method=rnm", "--size=64x48"],
    );
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["basins"], 3);
    assert_eq!(v["unconverged"], 0);
    let bytes = std::fs::read(&path).unwrap();
    let header = b"P6\n64 48\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 64 * 48 * 3);

    let again = dir.path().join("again.ppm");
    render(
        &again,
        &["--coeffs=-1,0,0,1", "--method=rnm", "--size=64x48"],
    );
    assert_eq!(std::fs::read(&again).unwrap(), bytes);

    let gray = dir.path().join("gray.ppm");
    let out = render(
        &gray,
        &[
            "--coeffs=2,-2,0,1",
            "--method=newton",
            "--size=16x16",
            "--palette=grayscale",
            "--center=0.5",
            "--width=3",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(json(&out)["unconverged"].as_u64().unwrap() > 0);
}

#[test]
fn verify_default_passes_and_replays() {
    let a = rnm(&["verify"]);
    assert_eq!(code(&a), 0);
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(
        text.contains("PASS modulus_reduction: 500 passed, 0 failed"),
        "{text}"
    );
    assert_eq!(rnm(&["verify"]).stdout, a.stdout);
    assert_ne!(rnm(&["verify", "--rng-seed=3"]).stdout, a.stdout);
}

#[test]
fn verify_vacuous_and_corrupted() {
    assert_eq!(code(&rnm(&["verify", "--samples=0"])), 0);
    let out = rnm(&["verify", "--corrupt-step-scale=2"]);
    assert_eq!(code(&out), 5);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("counterexample: "))
        .unwrap();
    let v: Value = serde_json::from_str(&line["counterexample: ".len()..]).unwrap();
    assert_eq!(v["check"], "modulus_reduction");
}

#[test]
fn help_documents_literal_syntax() {
    let out = rnm(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("a+bi"));
    assert!(!text.contains("corrupt"));
}

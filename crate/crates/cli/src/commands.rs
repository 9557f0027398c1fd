use std::fs;
use std::io::{self, Write};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use rnm_core::poly::parse_complex;
use rnm_core::render::{render_basins, write_image, Palette, RenderMethod, Window};
use rnm_core::roots::{solve_all, SolveOptions};
use rnm_core::smale::run_newton;
use rnm_core::trace::write_csv;
use rnm_core::verify::{run_verify, VerifyConfig, DEFAULT_RNG_SEED};
use rnm_core::{
    hybrid_solve, run_modified_rnm, run_rnm, Complex, Error, HybridOptions, Orbit, Polynomial,
    StoppingCriteria, Termination,
};

use crate::args::{Cli, Command, Common, Method, PaletteArg};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_PRODUCT: u8 = 2;
pub const EXIT_MAX_ITERS: u8 = 3;
pub const EXIT_NO_CONVERGENCE: u8 = 4;
pub const EXIT_VERIFY: u8 = 5;

const DEFAULT_MAX_ITERS: usize = 1_000_000;
const DEFAULT_RENDER_MAX_ITERS: usize = 10_000;

pub fn run(cli: &Cli) -> Result<u8> {
    let common = &cli.common;
    if !(common.eps > 0.0 && common.eps < 1.0) {
        bail!("--eps must lie in (0, 1), got {}", common.eps);
    }
    match &cli.command {
        Command::Eval => eval(common),
        Command::Solve {
            greedy_compare,
            amplitude_refresh,
        } => solve(common, *greedy_compare, *amplitude_refresh),
        Command::Roots => roots(common),
        Command::Trace {
            output,
            greedy_compare,
            amplitude_refresh,
        } => {
            let orbit = iterate(common, *greedy_compare, *amplitude_refresh)?;
            match output {
                Some(path) => {
                    let file = fs::File::create(path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    write_csv(&orbit, io::BufWriter::new(file))?;
                }
                None => write_csv(&orbit, io::stdout().lock())?,
            }
            Ok(exit_for(orbit.termination))
        }
        Command::Render {
            size,
            center,
            width,
            height,
            output,
            palette,
        } => {
            let (px_w, px_h) = parse_size(size)?;
            let center = parse_complex(center)?;
            let height = height.unwrap_or(width * px_h as f64 / px_w as f64);
            let window = Window::new(center, *width, height, px_w, px_h)?;
            let method = match common.method.unwrap_or(Method::Plain) {
                Method::Plain => RenderMethod::Rnm,
                Method::Modified => RenderMethod::ModifiedRnm,
                Method::Newton => RenderMethod::Newton,
                Method::Hybrid => bail!("render supports --method plain, modified or newton"),
            };
            let p = polynomial(common)?;
            let max_iters = common.max_iters.unwrap_or(DEFAULT_RENDER_MAX_ITERS);
            let grid = render_basins(&p, &window, method, common.eps, max_iters)?;
            let palette = match palette {
                PaletteArg::Classic => Palette::Classic,
                PaletteArg::Grayscale => Palette::Grayscale,
            };
            write_image(&grid, palette, output)?;
            print_json(&json!({
                "output": output.display().to_string(),
                "width": grid.width,
                "height": grid.height,
                "basins": grid.basins().len(),
                "unconverged": grid.unconverged(),
            }))?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            samples,
            corrupt_step_scale,
        } => verify(common, *samples, *corrupt_step_scale),
    }
}

fn polynomial(common: &Common) -> Result<Polynomial> {
    match (&common.coeffs, &common.poly_file) {
        (Some(text), None) => Ok(text.parse()?),
        (None, Some(path)) => {
            let raw =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            if raw.trim_start().starts_with('{') {
                serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))
            } else {
                Ok(raw.trim().parse()?)
            }
        }
        (Some(_), Some(_)) => bail!("give either --coeffs or --poly-file, not both"),
        (None, None) => bail!("a polynomial is required: pass --coeffs or --poly-file"),
    }
}

fn parse_size(text: &str) -> Result<(usize, usize)> {
    let (w, h) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow!("--size must look like WIDTHxHEIGHT, got `{text}`"))?;
    let parse = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => bail!("bad pixel count `{s}` in --size"),
        }
    };
    Ok((parse(w)?, parse(h)?))
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn pair(z: Complex) -> [f64; 2] {
    [z.re, z.im]
}

fn exit_for(termination: Termination) -> u8 {
    match termination {
        Termination::RootTolerance => EXIT_OK,
        Termination::ProductTolerance | Termination::CriticalPoint => EXIT_PRODUCT,
        Termination::MaxIters | Termination::Stalled => EXIT_MAX_ITERS,
    }
}

fn eval(common: &Common) -> Result<u8> {
    let p = polynomial(common)?;
    let z = parse_complex(&common.seed)?;
    let table = p.normalized_derivatives(z);
    print_json(&json!({
        "z": pair(z),
        "value": pair(table.value()),
        "modulus": table.value().norm(),
        "derivative": pair(table.derivative()),
        "amplitude": table.amplitude(),
        "taylor": table.values.iter().map(|&v| pair(v)).collect::<Vec<_>>(),
    }))?;
    Ok(EXIT_OK)
}

/// Orbit of the selected method from `--seed`.
fn iterate(common: &Common, greedy_compare: bool, amplitude_refresh: usize) -> Result<Orbit> {
    let p = polynomial(common)?;
    let seed = parse_complex(&common.seed)?;
    let eps = common.eps;
    let max_iters = common.max_iters.unwrap_or(DEFAULT_MAX_ITERS);
    if amplitude_refresh == 0 {
        bail!("--amplitude-refresh must be at least 1");
    }
    let orbit = match common.method.unwrap_or(Method::Modified) {
        Method::Plain => run_rnm(
            &p,
            seed,
            &StoppingCriteria::plain(eps, max_iters)?.with_amplitude_refresh(amplitude_refresh),
        )?,
        Method::Modified => {
            run_modified_rnm(&p, seed, &StoppingCriteria::modified(eps, max_iters)?)?
        }
        Method::Newton => run_newton(&p, seed, eps, max_iters, rnm_core::rnm::DEFAULT_REL_TOL)?,
        Method::Hybrid => {
            let opts = HybridOptions {
                max_iters,
                greedy_compare,
                ..HybridOptions::new(eps)
            };
            hybrid_solve(&p, seed, &opts)?.orbit
        }
    };
    Ok(orbit)
}

fn solve(common: &Common, greedy_compare: bool, amplitude_refresh: usize) -> Result<u8> {
    let orbit = iterate(common, greedy_compare, amplitude_refresh)?;
    print_json(&json!({
        "z": pair(orbit.final_point()),
        "residual": orbit.residual(),
        "termination": orbit.termination.as_str(),
        "iters": orbit.iterations(),
    }))?;
    Ok(exit_for(orbit.termination))
}

fn roots(common: &Common) -> Result<u8> {
    let p = polynomial(common)?;
    let opts = SolveOptions {
        eps: common.eps,
        max_iters: common.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
        ..Default::default()
    };
    match solve_all(&p, &opts) {
        Ok(set) => {
            print_json(&serde_json::to_value(&set)?)?;
            Ok(EXIT_OK)
        }
        Err(Error::ConvergenceFailure(partial)) => {
            print_json(&serde_json::to_value(&*partial)?)?;
            eprintln!("error: {}", Error::ConvergenceFailure(partial));
            Ok(EXIT_NO_CONVERGENCE)
        }
        Err(e) => Err(e.into()),
    }
}

fn verify(common: &Common, samples: usize, step_scale: f64) -> Result<u8> {
    let report = run_verify(&VerifyConfig {
        samples,
        rng_seed: common.rng_seed.unwrap_or(DEFAULT_RNG_SEED),
        step_scale,
    })?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "verify: {} samples, rng seed {}",
        report.samples, report.rng_seed
    )?;
    for tally in &report.tallies {
        let status = if tally.failed == 0 { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{status} {}: {} passed, {} failed",
            tally.check.as_str(),
            tally.passed,
            tally.failed
        )?;
    }
    if let Some(failure) = &report.first_failure {
        writeln!(out, "counterexample: {}", serde_json::to_string(failure)?)?;
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}

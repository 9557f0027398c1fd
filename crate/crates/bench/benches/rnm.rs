use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rnm_bench::{circle_polynomial, cube_roots_of_unity, smale_cubic};
use rnm_core::render::{render_basins, RenderMethod, Window};
use rnm_core::rnm::{robust_step, DEFAULT_REL_TOL};
use rnm_core::{run_modified_rnm, solve_all, Complex, SolveOptions, StoppingCriteria};

fn taylor_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("normalized_derivatives");
    for degree in [4, 16, 64] {
        let p = circle_polynomial(degree);
        let z = Complex::new(0.3, -0.7);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &p, |b, p| {
            b.iter(|| p.normalized_derivatives(black_box(z)))
        });
    }
    group.finish();
}

fn single_step(c: &mut Criterion) {
    let p = circle_polynomial(16);
    c.bench_function("robust_step/degree16", |b| {
        b.iter(|| robust_step(&p, black_box(Complex::new(1.2, 0.4)), DEFAULT_REL_TOL))
    });
    let crit = StoppingCriteria::modified(1e-10, 1_000_000).unwrap();
    let cubic = smale_cubic();
    c.bench_function("run_modified_rnm/smale_cubic", |b| {
        b.iter(|| run_modified_rnm(&cubic, black_box(Complex::new(-3.0, 0.0)), &crit))
    });
}

fn all_roots(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_all");
    group.sample_size(20);
    for degree in [3, 8, 16] {
        let p = circle_polynomial(degree);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &p, |b, p| {
            b.iter(|| solve_all(p, &SolveOptions::default()))
        });
    }
    group.finish();
}

fn basins(c: &mut Criterion) {
    let mut group = c.benchmark_group("render_basins");
    group.sample_size(10);
    let p = cube_roots_of_unity();
    let window = Window::square(Complex::new(0.0, 0.0), 4.0, 64).unwrap();
    for (name, method) in [("rnm", RenderMethod::Rnm), ("newton", RenderMethod::Newton)] {
        group.bench_function(name, |b| {
            b.iter(|| render_basins(&p, &window, method, 1e-10, 10_000))
        });
    }
    group.finish();
}

criterion_group!(benches, taylor_table, single_step, all_roots, basins);
criterion_main!(benches);

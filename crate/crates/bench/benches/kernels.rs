use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wallwalk_core::genfun::GenFun;
use wallwalk_core::measure::{build_measure, gauss_jacobi};
use wallwalk_core::polys::{eval_family, PolyFamily};
use wallwalk_core::specfun::{boundary_f, log_gamma};
use wallwalk_core::walk::{evolve, simulate_with_threads, WalkParams};

fn special_functions(c: &mut Criterion) {
    c.bench_function("log_gamma", |b| b.iter(|| log_gamma(black_box(7.25))));
    c.bench_function("boundary_f near 1", |b| {
        b.iter(|| boundary_f(black_box(1.5), black_box(0.9)))
    });
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("rules");
    for n in [64, 256, 1024] {
        g.bench_with_input(BenchmarkId::new("gauss_jacobi", n), &n, |b, &n| {
            b.iter(|| gauss_jacobi(-0.25, n))
        });
        g.bench_with_input(BenchmarkId::new("spectral_measure", n), &n, |b, &n| {
            b.iter(|| build_measure(1.5, n))
        });
    }
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let mu = build_measure(1.5, 512).unwrap();
    c.bench_function("gram 30", |b| b.iter(|| mu.gram(black_box(30))));
    c.bench_function("transition row n=100", |b| {
        b.iter(|| mu.transition_row(black_box(0), black_box(100)))
    });
    let gf = GenFun::new(1.5).unwrap();
    c.bench_function("genfun z=0.99", |b| {
        b.iter(|| gf.generating_functions(&mu, black_box(0.99)))
    });
    c.bench_function("Q degree 200", |b| {
        b.iter(|| eval_family(PolyFamily::Q { delta: 1.5 }, 200, black_box(0.3)))
    });
}

fn walk(c: &mut Criterion) {
    let params = WalkParams::new(1.5).unwrap();
    let mut g = c.benchmark_group("walk");
    g.sample_size(10);
    g.bench_function("dp n=4096", |b| {
        b.iter(|| evolve(&params, 0, black_box(4096)))
    });
    g.bench_function("mc 1e5 paths n=100", |b| {
        b.iter(|| simulate_with_threads(&params, 0, 100, 100_000, black_box(1), None))
    });
    g.finish();
}

criterion_group!(benches, special_functions, quadrature, spectral, walk);
criterion_main!(benches);

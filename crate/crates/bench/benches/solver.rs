use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use peakhabit::analysis::linspace;
use peakhabit::*;

fn base() -> Model {
    Model::new(&ModelParams::base()).unwrap()
}

fn closed_form(c: &mut Criterion) {
    let m = base();
    c.bench_function("slice_uncached", |b| {
        b.iter(|| m.slice_uncached(black_box(4.0)).unwrap())
    });
    let hs = linspace(0.1, 20.0, 200);
    c.bench_function("thresholds_grid_200", |b| {
        b.iter_batched(
            base,
            |m| thresholds_on_grid(&m, black_box(&hs)).unwrap(),
            BatchSize::SmallInput,
        )
    });
    c.bench_function("invert", |b| b.iter(|| invert(&m, black_box(60.0), 4.0).unwrap()));
    c.bench_function("evaluate_policy", |b| {
        b.iter(|| evaluate_policy(&m, black_box(60.0), 4.0).unwrap())
    });
    c.bench_function("bliss_inverse", |b| {
        b.iter(|| bliss_inverse(&m, black_box(120.0)).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let m = base();
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    let cfg = SimConfig::new(10.0, 1.0 / 252.0, 200, 1);
    g.bench_function("simulate_primal_200x2520", |b| {
        b.iter(|| simulate_primal(&m, 60.0, 4.0, &cfg).unwrap())
    });
    let ys = [0.5, 0.7, 1.0];
    g.bench_function("budget_3y_200x2520", |b| {
        b.iter(|| budget_functional_multi(&m, &ys, 4.0, &cfg).unwrap())
    });
    g.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("alpha_default_10", |b| {
        b.iter(|| run_sweep(&SweepSpec::alpha_default(10)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, closed_form, monte_carlo, sweeps);
criterion_main!(benches);

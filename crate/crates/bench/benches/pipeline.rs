use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gda_lab::divergence::{oracle_check, IntegrationGrid};
use gda_lab::{
    augment, eval_bgmm_bound, fit_conditional_gmm, fit_erm, mc_true_risk, run_sweep, BoundMode, Gamma, LossKind,
};
use gda_lab_bench::{params, real_set, small_sweep};

fn bench_trial_parts(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial");
    for d in [1usize, 50] {
        let data = real_set(d, 40, 1);
        let p = params(d);
        group.bench_with_input(BenchmarkId::new("fit_erm", d), &data, |b, data| {
            b.iter(|| fit_erm(black_box(data), 0.36).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fit_generator", d), &data, |b, data| {
            b.iter(|| fit_conditional_gmm(black_box(data)).unwrap())
        });
        let gen = fit_conditional_gmm(&data).unwrap();
        group.bench_with_input(BenchmarkId::new("augment_x50", d), &data, |b, data| {
            b.iter(|| augment(black_box(data), &gen, Gamma::integer(50), 2))
        });
        let clf = fit_erm(&data, 0.36).unwrap();
        group.bench_with_input(BenchmarkId::new("mc_true_risk_10k", d), &p, |b, p| {
            b.iter(|| mc_true_risk(&clf, black_box(p), 10_000, 3, LossKind::Nll).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let (grid, settings) = small_sweep();
    c.bench_function("small_sweep", |b| {
        b.iter(|| run_sweep(black_box(&grid), &settings).unwrap())
    });
}

fn bench_bounds(c: &mut Criterion) {
    c.bench_function("bgmm_bound", |b| {
        b.iter(|| eval_bgmm_bound(black_box(50), 10, 500, 0.05, BoundMode::Predict).unwrap())
    });
    let grid = IntegrationGrid::default();
    c.bench_function("kl_oracle_draw", |b| {
        b.iter(|| oracle_check(1, black_box(5), &grid).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_trial_parts, bench_sweep, bench_bounds
}
criterion_main!(benches);

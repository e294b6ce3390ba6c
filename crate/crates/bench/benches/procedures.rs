use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use twostudy::rvalues::{adaptive_rvalues, bonferroni_rvalues, fdr_step};
use twostudy::simulation::{run_scenario, Method, SimScenario};
use twostudy::thresholds::{solve_adaptive_fdr_thresholds, solve_fdr_thresholds};
use twostudy::{select_by_threshold, ProcedureConfig};
use twostudy_bench::dataset;

fn rvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("rvalues");
    for m in [1_000, 10_000, 100_000] {
        let pvals = dataset(m, 1);
        let sel = select_by_threshold(&pvals, 0.025, 0.025).unwrap();
        group.bench_with_input(BenchmarkId::new("bonferroni+fdr", m), &sel, |b, sel| {
            b.iter(|| bonferroni_rvalues(black_box(sel), 0.5))
        });
        group.bench_with_input(BenchmarkId::new("adaptive", m), &sel, |b, sel| {
            b.iter(|| adaptive_rvalues(black_box(sel), 0.05, 0.5).unwrap())
        });
    }
    group.finish();

    let base: Vec<f64> = (0..100_000).map(|i| ((i * 7919) % 100_003) as f64 / 1e5).collect();
    c.bench_function("fdr_step/100000", |b| b.iter(|| fdr_step(black_box(&base))));
}

fn thresholds(c: &mut Criterion) {
    let config = ProcedureConfig::new(0.05);
    let mut group = c.benchmark_group("thresholds");
    for m in [1_000, 10_000] {
        let pvals = dataset(m, 2);
        group.bench_with_input(BenchmarkId::new("fdr", m), &pvals, |b, p| {
            b.iter(|| solve_fdr_thresholds(black_box(p), &config))
        });
        group.bench_with_input(BenchmarkId::new("adaptive-fdr", m), &pvals, |b, p| {
            b.iter(|| solve_adaptive_fdr_thresholds(black_box(p), &config))
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let scenario = SimScenario {
        replicates: 20,
        procedures: vec![Method::Fdr, Method::AdaptFdr, Method::FdrAuto, Method::MaxBh],
        ..SimScenario::new([0.85, 0.05, 0.05, 0.05], 3.0, 0.25)
    };
    let mut group = c.benchmark_group("simulation");
    group.sample_size(10);
    group.bench_function("20 replicates, m=1000", |b| b.iter(|| run_scenario(black_box(&scenario)).unwrap()));
    group.finish();
}

criterion_group!(benches, rvalues, thresholds, simulation);
criterion_main!(benches);

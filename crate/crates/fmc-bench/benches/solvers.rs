use criterion::{criterion_group, criterion_main, Criterion};
use fmc_core::generate::gap;
use fmc_core::iterated::{alg_iter_fmc, IterGuards, IterMode};
use fmc_core::lp::{build_large_lp, solve_vertex};
use fmc_core::oracle::exact_solve;
use fmc_core::randomized::{alg_large, Algorithm, RandomizedConfig};
use fmc_core::rounding::{dependent_round_trial, Marginals};
use fmc_core::special::greedy_kcover;
use std::hint::black_box;

fn bench_rounding(c: &mut Criterion) {
    let p = Marginals::new(vec![0.25; 16]).unwrap();
    let mut trial = 0u64;
    c.bench_function("dependent_round_16", |b| {
        b.iter(|| {
            trial += 1;
            black_box(dependent_round_trial(&p, 42, trial))
        })
    });
}

fn bench_simplex(c: &mut Criterion) {
    let inst = gap(3).unwrap();
    let model = build_large_lp(&inst, 8).unwrap();
    c.bench_function("simplex_gap3_strengthened", |b| {
        b.iter(|| black_box(solve_vertex(&model).unwrap()))
    });
}

fn bench_greedy(c: &mut Criterion) {
    let inst = gap(4).unwrap();
    c.bench_function("greedy_kcover_gap4", |b| {
        b.iter(|| black_box(greedy_kcover(&inst, inst.k).unwrap()))
    });
}

fn bench_oracle(c: &mut Criterion) {
    let inst = gap(3).unwrap();
    c.bench_function("oracle_gap3", |b| {
        b.iter(|| black_box(exact_solve(&inst, 10_000_000).unwrap()))
    });
}

fn bench_alg_large(c: &mut Criterion) {
    let inst = gap(2).unwrap();
    let mut cfg = RandomizedConfig::new(Algorithm::Large, 9);
    cfg.trials = Some(25);
    cfg.opt_hash_override = Some(6);
    c.bench_function("alg_large_gap2_25_trials", |b| {
        b.iter(|| black_box(alg_large(&inst, &cfg).unwrap()))
    });
}

fn bench_iterated(c: &mut Criterion) {
    let inst = gap(2).unwrap();
    c.bench_function("iter_fmc_general_gap2", |b| {
        b.iter(|| black_box(alg_iter_fmc(&inst, IterMode::General, &IterGuards::default()).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_rounding,
    bench_simplex,
    bench_greedy,
    bench_oracle,
    bench_alg_large,
    bench_iterated
);
criterion_main!(benches);

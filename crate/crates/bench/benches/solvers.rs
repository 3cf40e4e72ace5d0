use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncdrank::eval::{block_graph, kendall_tau, seeded_rng, BlockGraphParams};
use ncdrank::ranking::{ncdawarerank, pagerank, RankingModel, Workspace};
use ncdrank::separable::solve_separable;
use ncdrank::{Decomposition, PageRankConfig, RankingConfig, SparseGraph};
use rand::Rng;

fn instance(nodes: usize, intra: f64) -> (SparseGraph, Decomposition) {
    let p = BlockGraphParams {
        nodes,
        blocks: nodes / 100,
        intra_probability: intra,
        ..BlockGraphParams::default()
    };
    block_graph(&p, &mut seeded_rng(1, 0)).unwrap()
}

/// One application of the operator, serial and on the rayon pool.
fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for n in [10_000usize, 100_000] {
        let (g, d) = instance(n, 0.9);
        for workers in [1usize, 0] {
            let cfg = RankingConfig {
                workers: (workers > 0).then_some(workers),
                ..RankingConfig::default()
            };
            let model = RankingModel::new(&g, std::slice::from_ref(&d), &cfg).unwrap();
            let x = vec![1.0 / n as f64; n];
            let mut out = vec![0.0; n];
            let mut ws = Workspace::default();
            let label = if workers == 1 { "serial" } else { "pool" };
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                b.iter(|| model.apply_into(black_box(&x), &mut out, &mut ws))
            });
        }
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    let (g, d) = instance(10_000, 0.9);
    let decomps = std::slice::from_ref(&d);
    group.bench_function("ncdawarerank", |b| {
        b.iter(|| ncdawarerank(&g, decomps, &RankingConfig::default()).unwrap())
    });
    group.bench_function("pagerank", |b| {
        b.iter(|| pagerank(&g, None, &PageRankConfig::default()).unwrap())
    });

    // No cross-block links: every block is its own aggregate.
    let (g, d) = instance(10_000, 1.0);
    let decomps = std::slice::from_ref(&d);
    group.bench_function("separable", |b| {
        b.iter(|| solve_separable(&g, decomps, &RankingConfig::default()).unwrap())
    });
    group.bench_function("monolithic", |b| {
        b.iter(|| ncdawarerank(&g, decomps, &RankingConfig::default()).unwrap())
    });
    group.finish();
}

fn tau(c: &mut Criterion) {
    let mut rng = seeded_rng(2, 0);
    let n = 100_000;
    let a: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    c.bench_function("kendall_tau/100000", |bench| {
        bench.iter(|| kendall_tau(&a, &b).unwrap())
    });
}

criterion_group!(benches, step, solve, tau);
criterion_main!(benches);

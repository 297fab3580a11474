use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nashd_bench::{game, interior_profile, label, SIZES};
use nashd_core::{
    deviation_payoffs, nashd, nashd_subgradient, solve_fictitious_play, solve_nashd_gd, solve_regret_matching,
    GdConfig, LogitProfile,
};
use std::hint::black_box;

fn primitives(c: &mut Criterion) {
    let mut group = c.benchmark_group("primitives");
    for (n, m) in SIZES {
        let g = game(n, m);
        let sigma = interior_profile(&g);
        let z = LogitProfile::new(
            sigma.strategies().iter().map(|s| s.iter().map(|p| p.ln()).collect()).collect(),
        )
        .unwrap();
        let id = label(n, m);
        group.bench_with_input(BenchmarkId::new("deviation_payoffs", &id), &sigma, |b, s| {
            b.iter(|| deviation_payoffs(&g, 0, black_box(s)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("nashd", &id), &sigma, |b, s| {
            b.iter(|| nashd(&g, black_box(s)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("subgradient", &id), &z, |b, z| {
            b.iter(|| nashd_subgradient(&g, black_box(z)).unwrap())
        });
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solvers");
    group.sample_size(10);
    for (n, m) in [(2, 10), (3, 10)] {
        let g = game(n, m);
        let id = label(n, m);
        group.bench_function(BenchmarkId::new("nashd_gd", &id), |b| {
            b.iter(|| solve_nashd_gd(&g, &GdConfig::default()).unwrap())
        });
        group.bench_function(BenchmarkId::new("fp", &id), |b| b.iter(|| solve_fictitious_play(&g, 1000, 0).unwrap()));
        group.bench_function(BenchmarkId::new("rm", &id), |b| b.iter(|| solve_regret_matching(&g, 1000, 0).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, primitives, solvers);
criterion_main!(benches);

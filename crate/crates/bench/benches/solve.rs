use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ogl_bench::chain_problem;
use ogl_core::{default_rho_grid, foglasso_solve, reg_path, SolverOptions};
use std::hint::black_box;

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for g in [20, 50] {
        let (loss, gs, params) = chain_problem(100, g, 10, 1, 0.01);
        let x0 = vec![0.0; gs.p()];
        group.bench_with_input(BenchmarkId::new("rho=0.01", g), &g, |b, _| {
            b.iter(|| {
                foglasso_solve(
                    black_box(&loss),
                    &gs,
                    &params,
                    &SolverOptions::default(),
                    &x0,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn path(c: &mut Criterion) {
    let (loss, gs, _) = chain_problem(100, 50, 10, 1, 0.01);
    let grid = default_rho_grid();
    let mut group = c.benchmark_group("path");
    group.sample_size(10);
    group.bench_function("nine-point grid", |b| {
        b.iter(|| reg_path(black_box(&loss), &gs, &grid, &SolverOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, solve, path);
criterion_main!(benches);

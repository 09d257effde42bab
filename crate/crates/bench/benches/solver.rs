use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use tsbvp::expr::parse;
use tsbvp::oracle::naive_apply_f;
use tsbvp::solver::{apply_f_operator, picard_solve, residual, SolverConfig};
use tsbvp::timescale::{GridFunction, SampledTimeScale};
use tsbvp_bench::{continuum_problem, mixed_problem};

fn operator(c: &mut Criterion) {
    let mut group = c.benchmark_group("operator");
    let p = mixed_problem(1.0 / 56.0); // ~64 nodes
    let u = GridFunction::from_fn(p.grid().clone(), |t| 1.0 + t).unwrap();
    group.bench_function("apply_f_n64", |b| {
        b.iter(|| apply_f_operator(black_box(&p), black_box(&u)).unwrap())
    });
    group.bench_function("naive_apply_f_n64", |b| {
        b.iter(|| naive_apply_f(black_box(&p), black_box(&u)).unwrap())
    });
    let big = continuum_problem(0.001);
    let v = GridFunction::from_fn(big.grid().clone(), |t| 1.0 + t).unwrap();
    group.bench_function("apply_f_n1001", |b| {
        b.iter(|| apply_f_operator(black_box(&big), black_box(&v)).unwrap())
    });
    group.finish();
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    let p = continuum_problem(0.001);
    let cfg = SolverConfig::default();
    group.bench_function("picard_n1001", |b| {
        b.iter(|| picard_solve(black_box(&p), black_box(&cfg)).unwrap())
    });
    let u = GridFunction::from_fn(p.grid().clone(), |t| 0.5 + t - t * t / 2.0).unwrap();
    group.bench_function("residual_n1001", |b| {
        b.iter(|| residual(black_box(&p), black_box(&u)).unwrap())
    });
    group.finish();
}

fn parsing(c: &mut Criterion) {
    let mut group = c.benchmark_group("expr");
    let text = "0.45 + 4.625*(max(u-1,0) - max(u-2.2,0)) - 12*(max(u-4.2,0) - max(u-4.6,0))";
    group.bench_function("parse", |b| b.iter(|| parse(black_box(text)).unwrap()));
    let ast = parse(text).unwrap();
    group.bench_function("eval", |b| {
        b.iter(|| ast.eval(black_box(Some(2.5)), None).unwrap())
    });
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let p = mixed_problem(0.01);
    let spec = p.scale().clone();
    c.bench_function("sample_timescale", |b| {
        b.iter(|| SampledTimeScale::sample(black_box(&spec), black_box(0.001)).unwrap())
    });
}

criterion_group!(benches, operator, solve, parsing, sampling);
criterion_main!(benches);

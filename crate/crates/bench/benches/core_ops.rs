//! Benchmarks for the hot paths of the core library: quasi-shuffle products
//! (both cold and through the memoized engine), regularization, the
//! depth-two constant solver, construction of a small context, series
//! extraction, and relation finding.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qmzv_core::analysis::find_relations;
use qmzv_core::eisenstein::{BetaTable, EisensteinContext, EisensteinParams};
use qmzv_core::quasishuffle::{engine, ProductId, QsEngine};
use qmzv_core::regmaps::reg;
use qmzv_core::words::parse_word;

fn bench_products(c: &mut Criterion) {
    let u = parse_word("b2 b0 b1 b3").unwrap();
    let v = parse_word("b1 b0 b2").unwrap();
    let mut group = c.benchmark_group("quasishuffle");
    group.bench_function("balanced_4x3_cold", |b| {
        b.iter(|| {
            let eng = QsEngine::new();
            black_box(eng.product(ProductId::Balanced, black_box(&u), black_box(&v)).unwrap())
        })
    });
    group.bench_function("balanced_4x3_memoized", |b| {
        let eng = engine();
        b.iter(|| black_box(eng.product(ProductId::Balanced, black_box(&u), black_box(&v)).unwrap()))
    });
    let pu = parse_word("y(2|1) y(1|0) y(3|2)").unwrap();
    let pv = parse_word("y(1|1) y(2|0)").unwrap();
    group.bench_function("bi_index_stuffle_3x2_cold", |b| {
        b.iter(|| {
            let eng = QsEngine::new();
            black_box(eng.product(ProductId::StuffleYbi, black_box(&pu), black_box(&pv)).unwrap())
        })
    });
    group.finish();
}

fn bench_regularization(c: &mut Criterion) {
    let w = parse_word("b0 b0 b0 b2 b0 b3 b0 b1").unwrap();
    c.bench_function("reg/divergent_depth3", |b| {
        b.iter(|| black_box(reg(black_box(&w)).unwrap()))
    });
}

fn bench_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("beta_solve");
    group.sample_size(20);
    group.bench_function("weight_10", |b| {
        b.iter(|| black_box(BetaTable::solve(black_box(10)).unwrap()))
    });
    group.finish();
}

fn bench_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("context");
    group.sample_size(10);
    group.bench_function("build_depth2_w8_order16", |b| {
        b.iter(|| {
            black_box(
                EisensteinContext::build(EisensteinParams::new(2, 8, 16)).unwrap(),
            )
        })
    });
    group.finish();

    let ctx = EisensteinContext::build(EisensteinParams::new(2, 8, 16)).unwrap();
    c.bench_function("zeta_extraction/zq_2_3", |b| {
        b.iter(|| black_box(ctx.zeta_q(black_box(&[2, 3])).unwrap()))
    });
}

fn bench_relations(c: &mut Criterion) {
    let ctx = EisensteinContext::build(EisensteinParams::new(2, 4, 12)).unwrap();
    let mut group = c.benchmark_group("relations");
    group.sample_size(20);
    group.bench_function("weight3_order12", |b| {
        b.iter(|| black_box(find_relations(black_box(&ctx), 3, 2).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_products,
    bench_regularization,
    bench_solver,
    bench_construction,
    bench_relations
);
criterion_main!(benches);

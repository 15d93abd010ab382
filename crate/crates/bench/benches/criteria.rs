use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use cyclosieve::survey::{satisfaction_scan, ScanConfig};
use cyclosieve::{attach_pair, build_extension, check_main, make_context, symbol, CycloParams, IntPair};

fn fields(c: &mut Criterion) {
    let mut g = c.benchmark_group("field");
    for (q, f) in [(7u64, 4usize), (2999, 4), (101, 10)] {
        g.bench_function(format!("build_extension q={q} f={f}"), |b| {
            b.iter(|| build_extension(black_box(q), black_box(f)).unwrap())
        });
        g.bench_function(format!("find_generator q={q} f={f}"), |b| {
            b.iter_batched(
                || build_extension(q, f).unwrap(),
                |field| field.find_generator().clone(),
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn symbols(c: &mut Criterion) {
    let mut g = c.benchmark_group("symbol");
    for (p, q, n) in [(5u64, 31u64, 30u64), (5, 2999, 2), (7, 29, 28), (13, 397, 2)] {
        let params = CycloParams::new(p, q, n).unwrap();
        let ctx = make_context(&params, None, None).unwrap();
        let alpha = ctx.field().element_from_index(q as u128 + 5);
        g.bench_function(format!("symbol p={p} q={q} f={}", params.f), |b| {
            b.iter(|| symbol(&ctx, black_box(&alpha)).unwrap())
        });
        g.bench_function(format!("make_context p={p} q={q} f={}", params.f), |b| {
            b.iter(|| make_context(black_box(&params), None, None).unwrap())
        });
    }
    g.finish();
}

fn criteria(c: &mut Criterion) {
    let pair = IntPair::new(1, 3).unwrap();
    let params = attach_pair(5, 31, &pair).unwrap();
    let ctx = make_context(&params, Some(&pair), None).unwrap();
    c.bench_function("check_main p=5 q=31", |b| {
        b.iter(|| check_main(black_box(&ctx)).unwrap())
    });

    let params = CycloParams::new(11, 67, 66).unwrap();
    let ctx = make_context(&params, None, None).unwrap();
    c.bench_function("check_main p=11 q=67", |b| {
        b.iter(|| check_main(black_box(&ctx)).unwrap())
    });
}

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    g.bench_function("p=5 q<=2000", |b| {
        b.iter(|| satisfaction_scan(black_box(&ScanConfig::new(5, 7, 2000))).unwrap())
    });
    g.finish();
}

criterion_group!(benches, fields, symbols, criteria, scans);
criterion_main!(benches);

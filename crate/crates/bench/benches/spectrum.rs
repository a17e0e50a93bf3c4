use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_rational::BigRational;

use mdcf::cf::cf_parse;
use mdcf::hall::{self, BoundedCantor};
use mdcf::rational::{parse_rational, pow10};

fn mn_values(c: &mut Criterion) {
    let cf = cf_parse("[0;3,1,1,(100)]").unwrap();
    let width = BigRational::new(1.into(), pow10(20));
    c.bench_function("mn_values 0..=40", |b| b.iter(|| mdcf::mn_values(black_box(&cf), 0..=40, &width).unwrap()));
}

fn tau(c: &mut Criterion) {
    let cantor = BoundedCantor::f5();
    let tau = parse_rational("1.788").unwrap();
    let mut g = c.benchmark_group("tau");
    g.sample_size(10);
    g.bench_function("scan depth 6", |b| b.iter(|| hall::tau_scan(&cantor, black_box(6), &tau).unwrap()));
    g.bench_function("exact depth 4", |b| {
        b.iter(|| hall::tau_verify(&hall::enumerate_gaps(black_box(4)).unwrap(), &tau).unwrap())
    });
    g.finish();
}

fn construction(c: &mut Criterion) {
    let m = parse_rational("0.30").unwrap();
    let eps = parse_rational("1e-10").unwrap();
    let mut g = c.benchmark_group("construct");
    g.sample_size(10);
    g.bench_function("hall_solve m=0.30", |b| b.iter(|| mdcf::hall_solve(black_box(&m), 9, 10, &eps).unwrap()));
    g.bench_function("covering 6..60", |b| b.iter(|| hall::covering_check(6, black_box(60)).unwrap()));
    g.finish();
}

criterion_group!(benches, mn_values, tau, construction);
criterion_main!(benches);

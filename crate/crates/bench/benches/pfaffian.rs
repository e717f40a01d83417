use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use surface_dimer::pfaffian::pfaffian;
use surface_dimer_bench::{dense_exact, dense_float};

fn float_pfaffian(c: &mut Criterion) {
    let mut group = c.benchmark_group("pfaffian/float");
    for n in [20, 50, 100, 200, 400] {
        let m = dense_float(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| pfaffian(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn exact_pfaffian(c: &mut Criterion) {
    let mut group = c.benchmark_group("pfaffian/exact");
    group.sample_size(10);
    for n in [10, 20, 30, 40] {
        let m = dense_exact(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| pfaffian(black_box(m)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, float_pfaffian, exact_pfaffian);
criterion_main!(benches);

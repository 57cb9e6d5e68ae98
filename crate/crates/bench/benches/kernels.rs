use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tcpkit::{beta, solve_enumerate, SearchBudget};
use tcpkit_bench::{dominant_tensor, instance, point};

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply");
    for (m, n) in [(3, 4), (4, 6), (4, 10), (6, 6)] {
        let a = dominant_tensor(m, n);
        let x = point(n);
        group.bench_with_input(BenchmarkId::from_parameter(format!("m{m}n{n}")), &x, |b, x| {
            b.iter(|| a.apply(black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn beta_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("beta");
    group.sample_size(10);
    let budget = SearchBudget::default().with_multistarts(32);
    for (m, n) in [(3, 2), (3, 3), (4, 3)] {
        let a = dominant_tensor(m, n);
        group.bench_function(format!("m{m}n{n}"), |b| b.iter(|| beta(black_box(&a), &budget).unwrap()));
    }
    group.finish();
}

fn enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_enumerate");
    group.sample_size(10);
    let budget = SearchBudget::default();
    for (m, n) in [(3, 2), (3, 3), (4, 4)] {
        let inst = instance(m, n);
        group.bench_function(format!("m{m}n{n}"), |b| {
            b.iter(|| solve_enumerate(black_box(&inst), &budget).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, apply, beta_search, enumerate);
criterion_main!(benches);

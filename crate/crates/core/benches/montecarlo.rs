use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use risfade::aggregate::LinkBudget;
use risfade::channel::FadingParams;
use risfade::montecarlo::{mc_capacity, mc_cdf_a, Execution};

fn executions(c: &mut Criterion) {
    let p = FadingParams::modified(2.0, 2.5).unwrap();
    let grid: Vec<f64> = (1..=40).map(|k| k as f64 * 2.5).collect();
    let lb = LinkBudget::new(1.0, 1e-12, 50, 10.0, 1e13).unwrap();

    let mut group = c.benchmark_group("envelope_sum_cdf");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::new(name, 50), &exec, |b, &exec| {
            b.iter(|| mc_cdf_a(black_box(&grid), &p, 50, 262_144, 7, exec).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("capacity");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::new(name, 50), &exec, |b, &exec| {
            b.iter(|| mc_capacity(&p, black_box(&lb), 20e6, 262_144, 7, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, executions);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use rcq_bench::points;
use rcq_core::RangeClusterIndex;

fn build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    g.sample_size(10);
    for n in [10_000usize, 100_000] {
        let pts = points(n, 2, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter_batched(|| pts.clone(), |p| RangeClusterIndex::build(p).unwrap(), BatchSize::LargeInput)
        });
    }
    g.finish();
}

criterion_group!(benches, build);
criterion_main!(benches);

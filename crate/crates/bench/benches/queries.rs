use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rcq_bench::{boxes, index};
use rcq_core::{
    baseline_cluster, capacitated_cluster_query, cluster_query, three_center_query, two_center_query, CapacitatedSpec,
    CostKind, QuerySpec, SortedArray1D,
};

/// Engine against report-then-cluster as n grows, for a fixed (k, eps).
fn approx_vs_baseline(c: &mut Criterion) {
    let mut g = c.benchmark_group("approx_l2_k3_eps0.2");
    g.sample_size(10);
    let qs = boxes(16, 2, 0.9, 1.0, 7);
    for n in [10_000usize, 100_000, 1_000_000] {
        let idx = index(n, 2, 3);
        let specs: Vec<QuerySpec> = qs
            .iter()
            .map(|q| {
                let mut s = QuerySpec::new(q.clone(), 3, 0.2, CostKind::L2KCenter);
                s.report_members = false;
                s.budget.allow_greedy = true;
                s
            })
            .collect();
        g.bench_with_input(BenchmarkId::new("engine", n), &specs, |b, specs| {
            b.iter(|| specs.iter().map(|s| cluster_query(&idx, s).unwrap().clustering.cost).sum::<f64>())
        });
        g.bench_with_input(BenchmarkId::new("baseline", n), &specs, |b, specs| {
            b.iter(|| specs.iter().map(|s| baseline_cluster(&idx, s).unwrap().1).sum::<usize>())
        });
    }
    g.finish();
}

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    g.sample_size(20);
    let idx = index(100_000, 2, 5);
    let qs = boxes(32, 2, 0.1, 0.6, 9);
    g.bench_function("two_center", |b| b.iter(|| qs.iter().map(|q| two_center_query(&idx, q).unwrap().size).sum::<u64>()));
    g.bench_function("three_center", |b| {
        b.iter(|| qs.iter().take(8).map(|q| three_center_query(&idx, q).unwrap().size).sum::<u64>())
    });
    // The exact capacitated solver is budgeted to a few dozen points.
    let cap: Vec<CapacitatedSpec> = boxes(8, 2, 0.01, 0.015, 17)
        .into_iter()
        .map(|q| CapacitatedSpec::new(q, 2, 1.5, 0.5, 0.5))
        .collect();
    g.bench_function("capacitated_k2", |b| {
        b.iter(|| cap.iter().map(|s| capacitated_cluster_query(&idx, s).unwrap().size).sum::<f64>())
    });

    let line = SortedArray1D::build(&rcq_bench::points(100_000, 1, 11)).unwrap();
    let iv = boxes(64, 1, 0.05, 0.9, 13);
    for k in [2usize, 4, 8] {
        g.bench_with_input(BenchmarkId::new("line_large_k", k), &k, |b, &k| {
            b.iter(|| iv.iter().map(|q| line.kcenter_query_largek(q.lo[0], q.hi[0], k).0.length).sum::<u64>())
        });
        g.bench_with_input(BenchmarkId::new("line_small_k", k), &k, |b, &k| {
            b.iter(|| iv.iter().map(|q| line.kcenter_query_smallk(q.lo[0], q.hi[0], k, false).0.length).sum::<u64>())
        });
    }
    black_box(&idx);
    g.finish();
}

criterion_group!(benches, approx_vs_baseline, exact);
criterion_main!(benches);

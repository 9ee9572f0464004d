use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phylonet::hn::hn_exact;
use phylonet::reduce::kernelize_utc;
use phylonet::uhn::uhn_solve;
use phylonet::utc::{utc_oracle, utc_solve};
use phylonet::Limits;
use phylonet_bench::{containment, rooted_pairs, unrooted_pairs};

fn containment_group(c: &mut Criterion) {
    let limits = Limits::default();
    let mut g = c.benchmark_group("containment");
    for r in 1..=3 {
        let suite = containment(8, r, 10);
        g.bench_with_input(BenchmarkId::new("kernelized", r), &suite, |b, s| {
            b.iter(|| s.iter().filter(|(n, t)| utc_solve(n, t, true).unwrap()).count())
        });
        g.bench_with_input(BenchmarkId::new("branching", r), &suite, |b, s| {
            b.iter(|| s.iter().filter(|(n, t)| utc_solve(n, t, false).unwrap()).count())
        });
        g.bench_with_input(BenchmarkId::new("oracle", r), &suite, |b, s| {
            b.iter(|| s.iter().filter(|(n, t)| utc_oracle(n, t, &limits).unwrap().is_some()).count())
        });
        g.bench_with_input(BenchmarkId::new("kernel", r), &suite, |b, s| {
            b.iter(|| s.iter().map(|(n, t)| kernelize_utc(n, t).unwrap().0.tree.taxon_count()).sum::<usize>())
        });
    }
    g.finish();
}

fn hybridization_group(c: &mut Criterion) {
    let limits = Limits::default();
    let mut g = c.benchmark_group("hybridization");
    g.sample_size(10);
    for taxa in [6, 8, 10] {
        let pairs = unrooted_pairs(taxa, 5);
        g.bench_with_input(BenchmarkId::new("unrooted", taxa), &pairs, |b, p| {
            b.iter(|| p.iter().map(|[t1, t2]| uhn_solve(t1, t2, &limits).unwrap().value).sum::<usize>())
        });
    }
    for taxa in [4, 5] {
        let pairs = rooted_pairs(taxa, 5);
        g.bench_with_input(BenchmarkId::new("rooted", taxa), &pairs, |b, p| {
            b.iter(|| p.iter().filter_map(|pair| hn_exact(pair, 3, &limits).unwrap()).count())
        });
    }
    g.finish();
}

criterion_group!(benches, containment_group, hybridization_group);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use trapmark::oracle::brute_mts_with;
use trapmark::parallel::Execution;
use trapmark::random::{random_network, rng};

fn brute_mts(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_mts");
    group.sample_size(10);
    for n in [8, 10] {
        let f = random_network(&mut rng(n as u64), n, 3);
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &f, |b, f| {
                b.iter(|| brute_mts_with(black_box(f), exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, brute_mts);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trapmark::bn::{BooleanNetwork, Configuration, PartialAssignment};
use trapmark::cegar::{enumerate_reprogramming, ReprogrammingOptions};
use trapmark::parallel::Execution;
use trapmark::random::{random_marker, random_network, rng};
use trapmark::trapspace::ts_of;

fn instances(count: u64, n: usize) -> Vec<(BooleanNetwork, PartialAssignment)> {
    (0..count)
        .map(|seed| {
            let mut r = rng(seed);
            let f = random_network(&mut r, n, 3);
            let m = random_marker(&mut r, &f, 2);
            (f, m)
        })
        .collect()
}

fn batch_reprogramming(c: &mut Criterion) {
    let batch = instances(16, 8);
    let options = ReprogrammingOptions::default();
    let mut group = c.benchmark_group("reprogramming_batch");
    group.sample_size(10);
    for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(label, |b| {
            b.iter(|| {
                exec.map(&batch, |(f, m)| enumerate_reprogramming(f, m, 2, &options).unwrap().solutions.len())
            })
        });
    }
    group.finish();
}

fn saturation(c: &mut Criterion) {
    let mut group = c.benchmark_group("ts_of_all_inputs");
    for n in [10, 14] {
        let f = random_network(&mut rng(1), n, 3);
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &f, |b, f| {
                b.iter(|| exec.map_range(1 << n, |i| ts_of(f, &Configuration::from_index(n, i)).free_dims().count()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, batch_reprogramming, saturation);
criterion_main!(benches);

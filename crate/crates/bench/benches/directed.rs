use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use causalrd::directed::{directed_information, optimal_r_kernel};
use causalrd::prob::causal_product;
use causalrd::random;
use causalrd::{Alphabet, KernelKind, SequenceIndexer};

fn layout(k: usize, n: usize) -> SequenceIndexer {
    SequenceIndexer::uniform(n, &Alphabet::new(k, "a").unwrap()).unwrap()
}

fn directed(c: &mut Criterion) {
    let mut group = c.benchmark_group("directed_information");
    for (k, n) in [(2, 3), (2, 5), (3, 3)] {
        let (x, y) = (layout(k, n), layout(k, n));
        let mut rng = random::seeded(7);
        let p = random::kernel(&mut rng, KernelKind::SourceFeedback, &x, &y).unwrap();
        let q = random::kernel(&mut rng, KernelKind::ChannelFeedforward, &x, &y).unwrap();
        let id = format!("k{k}_n{n}");
        group.bench_with_input(BenchmarkId::new("di", &id), &(&p, &q), |b, (p, q)| {
            b.iter(|| directed_information(p, q).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("joint", &id), &(&p, &q), |b, (p, q)| {
            b.iter(|| causal_product(p, q).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("optimal_r", &id), &(&p, &q), |b, (p, q)| {
            b.iter(|| optimal_r_kernel(p, q).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, directed);
criterion_main!(benches);

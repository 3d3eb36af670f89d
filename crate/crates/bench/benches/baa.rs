use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use causalrd::rdf::{baa_run, rd_curve, CurveMode};
use causalrd::{Alphabet, BaaConfig, DistortionSpec, FeedbackFreeSource, FinitePmf, Slope, UpdateRule};

fn markov(n: usize) -> FeedbackFreeSource {
    FeedbackFreeSource::markov(
        &FinitePmf::bernoulli(0.5).unwrap(),
        &[vec![0.8, 0.2], vec![0.3, 0.7]],
        &Alphabet::binary("y"),
        n,
    )
    .unwrap()
}

fn single_slope(c: &mut Criterion) {
    let mut group = c.benchmark_group("baa_run");
    group.sample_size(20);
    let s = Slope::new(-2.0).unwrap();
    for n in [2, 3, 4] {
        let source = markov(n);
        let d = DistortionSpec::hamming(2, n).unwrap();
        for rule in [UpdateRule::Stationary, UpdateRule::CausalExact] {
            let cfg = BaaConfig::default().with_rule(rule);
            group.bench_function(BenchmarkId::new(format!("{rule:?}"), n), |b| {
                b.iter(|| baa_run(&source, &d, s, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn curve(c: &mut Criterion) {
    let mut group = c.benchmark_group("rd_curve");
    group.sample_size(10);
    let source = markov(3);
    let d = DistortionSpec::hamming(2, 3).unwrap();
    let slopes: Vec<Slope> = (0..12).map(|k| Slope::new(-4.0 + 0.3 * k as f64).unwrap()).collect();
    let cfg = BaaConfig::default().with_rule(UpdateRule::CausalExact);
    for mode in [CurveMode::WarmStart, CurveMode::Cold, CurveMode::ColdParallel] {
        group.bench_function(format!("{mode:?}"), |b| {
            b.iter(|| rd_curve(&source, &d, &slopes, &cfg, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, single_slope, curve);
criterion_main!(benches);

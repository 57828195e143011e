//! End-to-end ensemble throughput: trials per second including trajectory
//! sampling, signal synthesis, filtering, and reduction.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use paritytrack::{run_ensemble, FilterSpec, SimConfig};

fn bench_ensemble(c: &mut Criterion) {
    let trials = 200u64;
    let config = SimConfig::new(1e-3, 1.0, 0.1, 2000, 7).unwrap();
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    group.throughput(Throughput::Elements(trials * config.n_steps as u64));
    for spec in [
        FilterSpec::Bayes { mu_est: None },
        FilterSpec::HalfBoxcar { dt_box: 8.85 },
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(spec.name()), &spec, |b, spec| {
            b.iter(|| black_box(run_ensemble(spec, &config, trials, None).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_ensemble);
criterion_main!(benches);

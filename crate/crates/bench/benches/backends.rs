use std::f64::consts::FRAC_PI_2;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dqc1_lpn::dqc1::{analytic_expectations, sample_expectations};
use dqc1_lpn::infomeasures::quantum_discord;
use dqc1_lpn::noise::probing_state;
use dqc1_lpn::Backend;
use dqc1_lpn_bench::{alternating, config, probing_block};

fn expectation_backends(c: &mut Criterion) {
    let mut group = c.benchmark_group("expectations");
    for n in [2, 4, 6] {
        let s = alternating(n).unwrap();
        let block = probing_block(&s, FRAC_PI_2).unwrap();
        for backend in [Backend::ClosedForm, Backend::Dense] {
            let cfg = config(n).with_backend(backend);
            group.bench_with_input(BenchmarkId::new(format!("{backend:?}"), n), &block, |b, w| {
                b.iter(|| analytic_expectations(black_box(&cfg), black_box(w)).unwrap())
            });
        }
    }
    group.finish();
}

fn discord(c: &mut Criterion) {
    let mut group = c.benchmark_group("discord");
    group.sample_size(10);
    for n in [2, 3] {
        let s = alternating(n).unwrap();
        let rho = probing_state(&s, &config(n), n - 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &rho, |b, rho| {
            b.iter(|| quantum_discord(black_box(rho), 0).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampling");
    let cfg = config(1);
    for (ensemble, queries) in [(1_000, 10), (1_000, 1_000), (1_000_000, 10)] {
        group.bench_function(format!("L{ensemble}_Q{queries}"), |b| {
            b.iter(|| sample_expectations(black_box(&cfg), 0.3, -0.2, ensemble, queries).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, expectation_backends, discord, sampling);
criterion_main!(benches);

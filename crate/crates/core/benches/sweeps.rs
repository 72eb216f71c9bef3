use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use pdm_core::par::Execution;
use pdm_core::verify::measures;
use pdm_core::verify::scenarios;
use pdm_core::{eom::Derivatives, verify::measures::adaptive};

fn residual_sweep(c: &mut Criterion) {
    let spec = scenarios::sw1_plus();
    let mut group = c.benchmark_group("exact-residual-sweep");
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| measures::exact_residual(black_box(&spec), 3.0, Derivatives::Analytic, exec).unwrap())
        });
    }
    group.finish();
}

fn trajectory_sweep(c: &mut Criterion) {
    let specs: Vec<_> = scenarios::trajectory_catalog()
        .into_iter()
        .filter(|(n, _)| !n.starts_with("power-law"))
        .map(|(_, s)| s)
        .collect();
    let mut group = c.benchmark_group("trajectory-sweep");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                pdm_core::par::map_slice(exec, &specs, |s| {
                    let t = 5.0 * s.period().unwrap();
                    measures::track_exact(s, t, &adaptive(t, 1e-10, 1e-12)).unwrap().max_deviation
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, residual_sweep, trajectory_sweep);
criterion_main!(benches);

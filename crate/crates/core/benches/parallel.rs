use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rfim_lab::bench::{run_experiment, Experiment, ExperimentConfig};
use rfim_lab::ising::{magnetization_samples, Beta};
use rfim_lab::Execution;

fn executions() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::default())]
}

fn ground_state_samples(c: &mut Criterion) {
    let mut group = c.benchmark_group("magnetization_samples");
    group.sample_size(10);
    for n in [8, 16] {
        for (name, exec) in executions() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| magnetization_samples(black_box(n), 1.0, Beta::Infinite, 32, 1, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn experiment_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);
    for (name, workers) in [("sequential", 1), ("parallel", 0)] {
        let grow = ExperimentConfig {
            n: vec![256],
            eps: vec![0.5],
            samples: 16,
            workers: Some(workers),
            ..ExperimentConfig::new(Experiment::GrowScan, 3)
        };
        group.bench_function(BenchmarkId::new(name, "grow_scan"), |b| b.iter(|| run_experiment(black_box(&grow)).unwrap()));
        let curves = ExperimentConfig { samples: 8, trials: 5, workers: Some(workers), ..ExperimentConfig::new(Experiment::CurveSuite, 3) };
        group.bench_function(BenchmarkId::new(name, "curve_suite"), |b| b.iter(|| run_experiment(black_box(&curves)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, ground_state_samples, experiment_batches);
criterion_main!(benches);

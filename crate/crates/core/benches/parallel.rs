use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ltlab::rumin::{rumin_functional_with, RuminOptions, TrialPair};
use ltlab::spectral::{monotonicity_experiment, radial_channels, spectrum_1d, GridOptions, PotentialSpec};
use ltlab::Execution;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn strong_coupling_spectrum(c: &mut Criterion) {
    let v = PotentialSpec::gaussian(1.0, 1.0, 1).unwrap().scaled(1e4, 1.0).unwrap();
    let mut g = c.benchmark_group("spectrum_1d");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = GridOptions { exec, ..GridOptions::with(8.0, 1e-3) };
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| spectrum_1d(black_box(&v), &opts, 0.0).unwrap()));
    }
    g.finish();
}

fn radial(c: &mut Criterion) {
    let v = PotentialSpec::gaussian(200.0, 1.0, 3).unwrap();
    let mut g = c.benchmark_group("radial_channels");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = GridOptions { exec, ..GridOptions::with(10.0, 5e-3) };
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| radial_channels(black_box(&v), 3, &opts).unwrap()));
    }
    g.finish();
}

fn monotonicity(c: &mut Criterion) {
    let grid: Vec<f64> = (1..=20_000).map(|i| i as f64 * 5e-5).collect();
    let mut g = c.benchmark_group("monotonicity");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| monotonicity_experiment(3, 1.0, black_box(&grid), exec).unwrap())
        });
    }
    g.finish();
}

fn rumin(c: &mut Criterion) {
    let tp = TrialPair::reference();
    let mut g = c.benchmark_group("rumin_functional");
    g.sample_size(20);
    for (name, exec) in MODES {
        let opts = RuminOptions { rel_tol: 1e-10, exec };
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| rumin_functional_with(black_box(&tp), 1, &opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, strong_coupling_spectrum, radial, monotonicity, rumin);
criterion_main!(benches);

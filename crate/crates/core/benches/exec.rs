use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use persuade_sis::model::ModelParams;
use persuade_sis::optimal_control::{gradient, OcpSpec};
use persuade_sis::simulate::ControlSchedule;
use persuade_sis::sweep::{grid_mui, static_sweep, GridOptions};
use persuade_sis::Exec;

const POLICIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn bench_static_sweep(c: &mut Criterion) {
    let p = ModelParams::static_sweep_satisfying();
    let mut group = c.benchmark_group("static_sweep");
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| static_sweep(black_box(&p), (0.01, 0.96), 0.005, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("fd_gradient");
    group.sample_size(10);
    let u = ControlSchedule::constant(23.0, 46, 0.548).unwrap();
    for (name, exec) in POLICIES {
        let mut spec = OcpSpec::new(ModelParams::dynamic_signalling());
        spec.solver.exec = exec;
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| gradient(black_box(&spec), &u).unwrap())
        });
    }
    group.finish();
}

fn bench_grid(c: &mut Criterion) {
    let p = ModelParams::static_sweep_satisfying();
    let mut group = c.benchmark_group("grid_mui");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = GridOptions {
            step: 0.1,
            exec,
            ..GridOptions::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| grid_mui(black_box(&p), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_static_sweep, bench_gradient, bench_grid);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use weyltop::dynamics::{integrate_trajectory, sample_ensemble, IntegrationOptions};
use weyltop::geometry::{TopParams, TopSystem};
use weyltop::measurement::coincidence_fluxes;
use weyltop::numerics::AngularGrid;
use weyltop::wavefield::TwoTopState;
use weyltop::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn coincidence(c: &mut Criterion) {
    let grid = AngularGrid::new(8, 8, 8).unwrap();
    let mut g = c.benchmark_group("coincidence_quadrature");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "8x8x8"), |b| {
            b.iter(|| coincidence_fluxes(black_box(0.3), black_box(1.4), &grid, exec).unwrap())
        });
    }
    g.finish();
}

fn ensemble(c: &mut Criterion) {
    let state = TwoTopState::default_singlet(TopSystem::new(TopParams::unit(), 2).unwrap()).unwrap();
    let members = sample_ensemble(&state, 256, 1, 0.0, Execution::Sequential).unwrap().members;
    let opts = IntegrationOptions {
        dt: 1e-2,
        record_every: usize::MAX,
        ..IntegrationOptions::default()
    };
    let mut g = c.benchmark_group("ensemble_integration");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "256x100steps"), |b| {
            b.iter(|| {
                exec.try_map(members.len(), |i| integrate_trajectory(&state, &members[i], 0.0, 1.0, &opts))
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, coincidence, ensemble);
criterion_main!(benches);

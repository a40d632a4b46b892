//! Data-parallel vs sequential execution on the three hottest workloads:
//! an ensemble of short runs, the mixing-bound sweep, and the clipping-error
//! Monte Carlo. Both paths produce byte-identical results; this suite only
//! measures the speed difference (`cargo bench --bench parallel`).

use criterion::{criterion_group, criterion_main, Criterion};
use hclip_core::analysis::verify_clip_error;
use hclip_core::engine::{run, RunConfig, SimSetup};
use hclip_core::exec;
use hclip_core::graph::GraphSchedule;
use hclip_core::noise::NoiseModel;
use hclip_core::objective::Problem;
use hclip_core::schedule::Schedule;
use std::hint::black_box;

fn ensemble_runs(c: &mut Criterion) {
    let problem = Problem::generate_synthetic(8, 10, 40, 0.5, 0.1, 7).unwrap();
    let graph = GraphSchedule::switching_ring(8, 4, 0.2).unwrap();
    let schedule = Schedule::new(0.2, 1.0, 0.75, 2.0, 0.25).unwrap();
    let noise = NoiseModel::StudentT { dof: 2.0, scale: 0.2 };
    let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
    let run_one = |seed: usize| {
        let cfg = RunConfig {
            horizon: 150,
            stride: 50,
            seed: seed as u64,
            delta: 0.1,
            clip_enabled: true,
            record_states: false,
        };
        run(&setup, &cfg).unwrap().records.last().unwrap().run_avg_gap
    };
    let mut group = c.benchmark_group("ensemble_16_runs");
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(exec::map_indexed(16, run_one)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(exec::map_indexed_seq(16, run_one)))
    });
    group.finish();
}

fn mixing_bound_sweep(c: &mut Criterion) {
    let graph = GraphSchedule::switching_ring(12, 4, 0.2).unwrap();
    let mut group = c.benchmark_group("mixing_bound_sweep");
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(graph.verify_lemma1(120, 8, 0).unwrap().violations))
    });
    group.finish();
}

fn clip_error_mc(c: &mut Criterion) {
    let noise = NoiseModel::StudentT { dof: 2.0, scale: 0.2 };
    let grad = vec![0.3, 0.4, -0.1, 0.2];
    let sigma = noise.declared_sigma(grad.len(), 1.5).unwrap();
    let mut group = c.benchmark_group("clip_error_mc_50k");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            black_box(verify_clip_error(&grad, 2.0, &noise, sigma, 1.5, 50_000, 3).unwrap())
        })
    });
    group.finish();
}

criterion_group!(benches, ensemble_runs, mixing_bound_sweep, clip_error_mc);
criterion_main!(benches);

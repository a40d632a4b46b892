//! End-to-end certification of the trajectory bounds on medium-size runs,
//! plus determinism across thread counts and recording strides.

use hclip_core::analysis::{
    verify_clip_error, verify_consensus_contraction, verify_gradient_growth,
};
use hclip_core::engine::{run, RunConfig, SimSetup};
use hclip_core::exec;
use hclip_core::graph::GraphSchedule;
use hclip_core::noise::NoiseModel;
use hclip_core::objective::Problem;
use hclip_core::schedule::Schedule;
use hclip_core::stream::substream;
use rand::Rng;

struct Desk {
    problem: Problem,
    graph: GraphSchedule,
    schedule: Schedule,
    noise: NoiseModel,
}

fn desk() -> Desk {
    Desk {
        problem: Problem::generate_synthetic(20, 20, 60, 0.5, 0.1, 7).unwrap(),
        graph: GraphSchedule::switching_ring(20, 4, 0.2).unwrap(),
        schedule: Schedule::new(0.2, 1.0, 0.75, 2.0, 0.25).unwrap(),
        noise: NoiseModel::StudentT { dof: 2.0, scale: 0.2 },
    }
}

fn cfg(seed: u64, horizon: usize, stride: usize, record_states: bool) -> RunConfig {
    RunConfig { horizon, stride, seed, delta: 0.1, clip_enabled: true, record_states }
}

#[test]
fn trajectory_bounds_hold_on_a_desk_size_run() {
    let d = desk();
    let setup = SimSetup {
        problem: &d.problem,
        graph: &d.graph,
        schedule: &d.schedule,
        noise: &d.noise,
    };
    let result = run(&setup, &cfg(1, 800, 1, true)).unwrap();
    let consensus = verify_consensus_contraction(&result, &d.graph, &d.schedule).unwrap();
    assert_eq!(
        consensus.violations, 0,
        "consensus bound broken: worst {} at {:?}",
        consensus.worst_margin, consensus.worst_t
    );
    let growth = verify_gradient_growth(&result, &d.problem, &d.schedule).unwrap();
    assert_eq!(
        growth.check.violations, 0,
        "gradient growth bound broken: worst {}",
        growth.check.worst_margin
    );
}

#[test]
fn telemetry_is_stride_invariant() {
    // Telemetry is accumulated at full resolution no matter how sparsely it
    // is recorded, so rows at shared times must agree bit for bit.
    let d = desk();
    let setup = SimSetup {
        problem: &d.problem,
        graph: &d.graph,
        schedule: &d.schedule,
        noise: &d.noise,
    };
    let fine = run(&setup, &cfg(2, 400, 1, false)).unwrap();
    let coarse = run(&setup, &cfg(2, 400, 7, false)).unwrap();
    assert!(coarse.records.len() < fine.records.len());
    for rc in &coarse.records {
        let rf = fine.records.iter().find(|r| r.t == rc.t).expect("shared time");
        assert_eq!(rf.fbar_gap.to_bits(), rc.fbar_gap.to_bits(), "t={}", rc.t);
        assert_eq!(rf.run_avg_gap.to_bits(), rc.run_avg_gap.to_bits(), "t={}", rc.t);
        assert_eq!(rf.consensus_max.to_bits(), rc.consensus_max.to_bits(), "t={}", rc.t);
        assert_eq!(rf.z_t.to_bits(), rc.z_t.to_bits(), "t={}", rc.t);
        assert_eq!(rf.delta_t.to_bits(), rc.delta_t.to_bits(), "t={}", rc.t);
        assert_eq!(rf.theta_acc.to_bits(), rc.theta_acc.to_bits(), "t={}", rc.t);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let d = desk();
    let setup = SimSetup {
        problem: &d.problem,
        graph: &d.graph,
        schedule: &d.schedule,
        noise: &d.noise,
    };
    let narrow = exec::with_jobs(Some(1), || run(&setup, &cfg(3, 150, 1, false)).unwrap());
    let wide = exec::with_jobs(Some(4), || run(&setup, &cfg(3, 150, 1, false)).unwrap());
    assert_eq!(narrow.records.len(), wide.records.len());
    for (a, b) in narrow.records.iter().zip(&wide.records) {
        assert_eq!(a.fbar_gap.to_bits(), b.fbar_gap.to_bits(), "t={}", a.t);
        assert_eq!(a.theta_acc.to_bits(), b.theta_acc.to_bits(), "t={}", a.t);
    }
    assert_eq!(narrow.final_states, wide.final_states);
    // The Monte Carlo reduction is likewise chunked deterministically.
    let grad = vec![0.3, -0.4, 0.2];
    let sigma = d.noise.declared_sigma(3, 1.5).unwrap();
    let a = exec::with_jobs(Some(1), || {
        verify_clip_error(&grad, 2.0, &d.noise, sigma, 1.5, 20_000, 9).unwrap()
    });
    let b = exec::with_jobs(Some(4), || {
        verify_clip_error(&grad, 2.0, &d.noise, sigma, 1.5, 20_000, 9).unwrap()
    });
    assert_eq!(a.bias_norm.to_bits(), b.bias_norm.to_bits());
    assert_eq!(a.second_moment.to_bits(), b.second_moment.to_bits());
}

#[test]
fn random_schedule_batch_respects_the_mixing_bound() {
    // A scaled-down version of the full verification sweep: random sizes,
    // windows, and floors, each schedule validated and then checked against
    // the entrywise contraction bound.
    let mut rng = substream(2024, 0, 0);
    for trial in 0..12u64 {
        let n = rng.random_range(2..=8usize);
        let b = rng.random_range(1..=4usize);
        let eta = rng.random_range(0.05..=0.5f64);
        let period = b * rng.random_range(1..=3usize);
        let schedule = GraphSchedule::random(n, b, eta, period, trial).unwrap();
        let valid = schedule.validate(4 * b).unwrap();
        assert!(valid.pass, "trial {trial}: {:?}", valid.violation);
        let report = schedule.verify_lemma1(80, 3, trial).unwrap();
        assert_eq!(
            report.violations, 0,
            "trial {trial} (n={n}, b={b}, eta={eta:.3}): worst {} at {:?}",
            report.worst_margin, report.worst_at
        );
    }
}

#[test]
fn clip_error_bounds_hold_on_a_small_grid() {
    let noise = NoiseModel::StudentT { dof: 2.0, scale: 0.2 };
    let p = 1.5;
    let mut rng = substream(99, 0, 0);
    for pair in 0..4 {
        let dim = rng.random_range(2..=20usize);
        let grad: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm: f64 = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        let lambda = 2.0 * norm + rng.random_range(0.5..2.0);
        let sigma = noise.declared_sigma(dim, p).unwrap();
        let report = verify_clip_error(&grad, lambda, &noise, sigma, p, 20_000, pair).unwrap();
        assert_eq!(report.cap_violations, 0, "pair {pair}");
        assert!(report.grad_within_half, "lambda was chosen above twice the gradient");
        assert_eq!(report.moments_ok, Some(true), "pair {pair}: {report:?}");
    }
}

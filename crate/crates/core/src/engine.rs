//! The distributed clipped-gradient simulation loop.
//!
//! Agents repeat, for `t = 1, ..., T` with states `x_{i,1}` drawn uniformly
//! from `[-1, 1]^d`:
//!
//! ```text
//! g_i,t = grad f_i(x_i,t) + xi_i,t          stochastic local gradient
//! ~g_i,t = clip(g_i,t, lambda_t)            clip(v, L) = min(1, L/||v||) v
//! y_i,t = sum_j W_t[i][j] x_j,t             mix with current neighbors
//! x_i,t+1 = y_i,t - eta_t ~g_i,t            step
//! ```
//!
//! Gradients are evaluated at the pre-mix states. Because every `W_t` is
//! doubly stochastic, mixing preserves the network average, so the average
//! state obeys `xbar_{t+1} = xbar_t - (eta_t/n) sum_i ~g_i,t` exactly — a
//! sharp invariant the tests lean on.
//!
//! Alongside the iterates the engine tracks, at full resolution regardless
//! of the recording stride:
//!
//! - `fbar_gap`: `f(xbar_t) - f*`,
//! - `run_avg_gap`: running mean of `fbar_gap` over `1..=t`,
//! - `consensus_max`: `max_i ||x_i,t - xbar_t||`,
//! - `delta_t`: `||xbar_t - x*||` and `z_t = 1/(a0 + 4 max_{l<=t} delta_l)`,
//! - `theta_acc`: the noise-term accumulator
//!   `sum_{l<=t} (2 z_l eta_l / n) sum_i <~g_i,l - grad f_i(x_i,l), xbar_l - x*>`,
//!   whose excursions the high-probability analysis bounds.
//!
//! Noise for agent `i` at step `t` comes from the dedicated substream
//! `(seed, i, t)`, so any slice of a run can be reproduced independently.

use crate::error::{Error, Result};
use crate::exec;
use crate::graph::GraphSchedule;
use crate::linalg;
use crate::noise::NoiseModel;
use crate::objective::Problem;
use crate::schedule::Schedule;
use crate::stream::{substream, uniform_point};

/// `min(1, level/||v||) v`; the zero vector is unchanged.
pub fn clip(v: &[f64], level: f64) -> Vec<f64> {
    assert!(level > 0.0, "clip level must be positive");
    let n = linalg::norm(v);
    if n <= level {
        v.to_vec()
    } else {
        let s = level / n;
        v.iter().map(|x| s * x).collect()
    }
}

/// Per-run knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Number of update steps `T`.
    pub horizon: usize,
    /// Record rows at `t = 1`, `t = T`, and every multiple of `stride`.
    pub stride: usize,
    pub seed: u64,
    /// Confidence level entering `a0 = max(1, ln(1/delta))`.
    pub delta: f64,
    /// `false` runs the unclipped baseline (only the clip is skipped).
    pub clip_enabled: bool,
    /// Keep per-agent state snapshots at recorded times.
    pub record_states: bool,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.stride == 0 {
            return Err(Error::InvalidArgument(format!(
                "need horizon >= 1 and stride >= 1, got {} and {}",
                self.horizon, self.stride
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }

    fn records_at(&self, t: usize) -> bool {
        t == 1 || t == self.horizon || t % self.stride == 0
    }
}

/// Everything a run needs besides the per-run knobs.
#[derive(Clone, Copy)]
pub struct SimSetup<'a> {
    pub problem: &'a Problem,
    pub graph: &'a GraphSchedule,
    pub schedule: &'a Schedule,
    pub noise: &'a NoiseModel,
}

/// One recorded row of run telemetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub fbar_gap: f64,
    pub run_avg_gap: f64,
    pub consensus_max: f64,
    pub z_t: f64,
    pub delta_t: f64,
    pub theta_acc: f64,
}

/// Output of a completed run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub cfg: RunConfig,
    pub records: Vec<StepRecord>,
    /// `(t, per-agent states x_{i,t})` at recorded times, if requested.
    pub states: Option<Vec<(usize, Vec<Vec<f64>>)>>,
    /// `x_{i,T+1}`.
    pub final_states: Vec<Vec<f64>>,
    /// `R1 = max_i ||x_{i,1}||`.
    pub r1: f64,
    /// `Delta1 = ||xbar_1 - x*||`.
    pub delta1: f64,
    /// Largest value the noise-term accumulator reached over the whole run.
    pub max_accumulator: f64,
}

/// Runs the loop. Fails with [`Error::NumericalFailure`] naming the step
/// that first produced a non-finite state or telemetry value.
pub fn run(setup: &SimSetup, cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let problem = setup.problem;
    let n = problem.n_agents();
    let dim = problem.dim();
    if setup.graph.n() != n {
        return Err(Error::InvalidArgument(format!(
            "graph is over {} agents but the problem has {n}",
            setup.graph.n()
        )));
    }
    let x_star = problem.minimizer();
    let a0 = (1.0 / cfg.delta).ln().max(1.0);

    let mut x: Vec<Vec<f64>> = (0..n)
        .map(|i| uniform_point(cfg.seed, i as u64, dim, -1.0, 1.0))
        .collect();
    let r1 = x.iter().map(|xi| linalg::norm(xi)).fold(0.0, f64::max);

    let mut records = Vec::with_capacity(cfg.horizon / cfg.stride + 2);
    let mut states = cfg.record_states.then(Vec::new);
    let mut delta1 = 0.0;
    let mut max_delta = 0.0f64;
    let mut gap_sum = 0.0;
    let mut theta_acc = 0.0;
    let mut max_accumulator = f64::NEG_INFINITY;

    for t in 1..=cfg.horizon {
        let xbar = linalg::mean_rows(&x);
        let diff_bar: Vec<f64> = xbar.iter().zip(x_star).map(|(a, b)| a - b).collect();
        let delta_t = linalg::norm(&diff_bar);
        if t == 1 {
            delta1 = delta_t;
        }
        max_delta = max_delta.max(delta_t);
        let z_t = 1.0 / (a0 + 4.0 * max_delta);
        let fbar_gap = problem.gap(&xbar);
        gap_sum += fbar_gap;
        let run_avg_gap = gap_sum / t as f64;

        let eta_t = setup.schedule.step_size(t);
        let lambda_t = setup.schedule.clip_level(t);

        // Per-agent work at the pre-mix states: true gradient, noisy
        // gradient, (optional) clip, and the pieces of the telemetry row.
        let per_agent: Vec<(Vec<f64>, f64, f64)> = exec::map_indexed(n, |i| {
            let grad = problem.agent(i).gradient(&x[i]);
            let mut rng = substream(cfg.seed, i as u64, t as u64);
            let xi = setup.noise.sample(dim, &mut rng);
            let noisy: Vec<f64> = grad.iter().zip(&xi).map(|(g, e)| g + e).collect();
            let tilde = if cfg.clip_enabled { clip(&noisy, lambda_t) } else { noisy };
            let theta_dot: f64 = tilde
                .iter()
                .zip(&grad)
                .zip(&diff_bar)
                .map(|((tg, g), d)| (tg - g) * d)
                .sum();
            let deviation = linalg::dist(&x[i], &xbar);
            (tilde, theta_dot, deviation)
        });
        let mut theta_dot_sum = 0.0;
        let mut consensus_max = 0.0f64;
        for (_, dot, dev) in &per_agent {
            theta_dot_sum += dot;
            consensus_max = consensus_max.max(*dev);
        }
        theta_acc += 2.0 * z_t * eta_t / n as f64 * theta_dot_sum;
        max_accumulator = max_accumulator.max(theta_acc);

        // A quadratic value overflows while the states are still well inside
        // the representable range, so the telemetry row needs its own check.
        if !(fbar_gap.is_finite()
            && run_avg_gap.is_finite()
            && consensus_max.is_finite()
            && z_t.is_finite()
            && delta_t.is_finite()
            && theta_acc.is_finite())
        {
            return Err(Error::NumericalFailure { t });
        }

        if cfg.records_at(t) {
            records.push(StepRecord {
                t,
                fbar_gap,
                run_avg_gap,
                consensus_max,
                z_t,
                delta_t,
                theta_acc,
            });
            if let Some(snaps) = states.as_mut() {
                snaps.push((t, x.clone()));
            }
        }

        let w = setup.graph.matrix(t);
        let next: Vec<Vec<f64>> = exec::map_indexed(n, |i| {
            let mut yi = vec![0.0; dim];
            for j in 0..n {
                let wij = w.get(i, j);
                if wij != 0.0 {
                    for (acc, v) in yi.iter_mut().zip(&x[j]) {
                        *acc += wij * v;
                    }
                }
            }
            for (acc, g) in yi.iter_mut().zip(&per_agent[i].0) {
                *acc -= eta_t * g;
            }
            yi
        });
        if next.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure { t });
        }
        x = next;
    }

    Ok(RunResult {
        cfg: *cfg,
        records,
        states,
        final_states: x,
        r1,
        delta1,
        max_accumulator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSchedule;
    use crate::noise::NoiseModel;
    use crate::objective::Quadratic;
    use crate::schedule::Schedule;

    fn small_setup() -> (Problem, GraphSchedule, Schedule, NoiseModel) {
        let problem = Problem::generate_synthetic(6, 5, 30, 0.5, 0.1, 7).unwrap();
        let graph = GraphSchedule::switching_ring(6, 3, 0.2).unwrap();
        let schedule = Schedule::new(0.2, 1.0, 0.75, 2.0, 0.25).unwrap();
        (problem, graph, schedule, NoiseModel::StudentT { dof: 2.0, scale: 0.2 })
    }

    fn cfg(seed: u64) -> RunConfig {
        RunConfig {
            horizon: 40,
            stride: 1,
            seed,
            delta: 0.1,
            clip_enabled: true,
            record_states: true,
        }
    }

    #[test]
    fn clip_caps_norm_and_preserves_direction() {
        let v = vec![3.0, 4.0];
        let c = clip(&v, 2.5);
        assert!((linalg::norm(&c) - 2.5).abs() < 1e-15);
        assert!((c[0] * v[1] - c[1] * v[0]).abs() < 1e-12, "direction preserved");
        let short = vec![0.3, 0.4];
        assert_eq!(clip(&short, 2.5), short, "short vectors pass through");
        assert_eq!(clip(&[0.0, 0.0], 1.0), vec![0.0, 0.0], "zero vector unchanged");
    }

    #[test]
    fn average_state_follows_the_update_identity() {
        // Doubly stochastic mixing preserves the average, so
        // xbar_{t+1} = xbar_t - (eta_t/n) sum_i ~g_i,t with ~g recomputed
        // from the recorded states and the per-(agent, step) noise streams.
        let (problem, graph, schedule, noise) = small_setup();
        let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
        let c = cfg(3);
        let out = run(&setup, &c).unwrap();
        let snaps = out.states.as_ref().unwrap();
        for win in snaps.windows(2) {
            let (t, ref xs) = win[0];
            let (t2, ref xs2) = win[1];
            assert_eq!(t2, t + 1, "stride-1 snapshots are consecutive");
            let xbar = linalg::mean_rows(xs);
            let xbar2 = linalg::mean_rows(xs2);
            let eta = schedule.step_size(t);
            let lambda = schedule.clip_level(t);
            let mut shift = vec![0.0; problem.dim()];
            for i in 0..problem.n_agents() {
                let grad = problem.agent(i).gradient(&xs[i]);
                let mut rng = substream(c.seed, i as u64, t as u64);
                let xi = noise.sample(problem.dim(), &mut rng);
                let noisy: Vec<f64> = grad.iter().zip(&xi).map(|(g, e)| g + e).collect();
                for (s, v) in shift.iter_mut().zip(clip(&noisy, lambda)) {
                    *s += v;
                }
            }
            for k in 0..problem.dim() {
                let predicted = xbar[k] - eta / problem.n_agents() as f64 * shift[k];
                assert!(
                    (predicted - xbar2[k]).abs() < 1e-10,
                    "average identity off at t={t}, coord {k}: {predicted} vs {}",
                    xbar2[k]
                );
            }
        }
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let (problem, graph, schedule, noise) = small_setup();
        let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
        let a = run(&setup, &cfg(5)).unwrap();
        let b = run(&setup, &cfg(5)).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.fbar_gap.to_bits(), rb.fbar_gap.to_bits());
            assert_eq!(ra.theta_acc.to_bits(), rb.theta_acc.to_bits());
            assert_eq!(ra.z_t.to_bits(), rb.z_t.to_bits());
        }
        assert_eq!(a.final_states, b.final_states);
        let c = run(&setup, &cfg(6)).unwrap();
        assert_ne!(
            a.records.last().unwrap().fbar_gap.to_bits(),
            c.records.last().unwrap().fbar_gap.to_bits(),
            "different seeds must differ"
        );
    }

    #[test]
    fn recording_stride_covers_endpoints() {
        let (problem, graph, schedule, noise) = small_setup();
        let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
        let mut c = cfg(1);
        c.horizon = 23;
        c.stride = 7;
        c.record_states = false;
        let out = run(&setup, &c).unwrap();
        let ts: Vec<usize> = out.records.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![1, 7, 14, 21, 23]);
        assert!(out.states.is_none());
    }

    #[test]
    fn run_average_is_the_mean_of_full_resolution_gaps() {
        let (problem, graph, schedule, noise) = small_setup();
        let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
        let out = run(&setup, &cfg(9)).unwrap();
        let mut acc = 0.0;
        for r in &out.records {
            acc += r.fbar_gap;
            let mean = acc / r.t as f64;
            assert!(
                (r.run_avg_gap - mean).abs() <= 1e-12 * mean.abs().max(1.0),
                "running average mismatch at t={}",
                r.t
            );
        }
    }

    #[test]
    fn normalizer_is_nonincreasing_and_consistent() {
        let (problem, graph, schedule, noise) = small_setup();
        let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
        let out = run(&setup, &cfg(2)).unwrap();
        let a0 = (1.0f64 / 0.1).ln();
        let mut max_delta = 0.0f64;
        let mut prev_z = f64::INFINITY;
        for r in &out.records {
            max_delta = max_delta.max(r.delta_t);
            assert!(r.z_t <= prev_z + 1e-15, "z must not increase at t={}", r.t);
            assert!(
                (r.z_t * (a0 + 4.0 * max_delta) - 1.0).abs() < 1e-12,
                "z inconsistent with the running max at t={}",
                r.t
            );
            prev_z = r.z_t;
        }
        assert!(out.max_accumulator >= out.records.last().unwrap().theta_acc - 1e-15);
    }

    #[test]
    fn initial_radius_and_distance_are_reported() {
        let (problem, graph, schedule, noise) = small_setup();
        let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
        let c = cfg(4);
        let out = run(&setup, &c).unwrap();
        let inits: Vec<Vec<f64>> = (0..problem.n_agents())
            .map(|i| uniform_point(c.seed, i as u64, problem.dim(), -1.0, 1.0))
            .collect();
        let r1 = inits.iter().map(|v| linalg::norm(v)).fold(0.0, f64::max);
        assert_eq!(out.r1.to_bits(), r1.to_bits());
        let xbar1 = linalg::mean_rows(&inits);
        let d1 = linalg::dist(&xbar1, problem.minimizer());
        assert_eq!(out.delta1.to_bits(), d1.to_bits());
        assert_eq!(out.records[0].delta_t.to_bits(), d1.to_bits());
    }

    #[test]
    fn unclipped_steep_problem_fails_numerically() {
        // One huge-curvature coordinate with eta_1 = 5 amplifies the state by
        // roughly eta * L per step; without clipping this overflows quickly
        // and the failure names the offending step.
        let a = Quadratic::from_data(&[vec![1.0e4]], &[0.0], 0.0).unwrap();
        let b = Quadratic::from_data(&[vec![1.0e4]], &[1.0], 0.0).unwrap();
        let problem = Problem::new(vec![a, b]).unwrap();
        let graph = GraphSchedule::complete(2).unwrap();
        let schedule = Schedule::new(0.2, 1.0, 0.75, 2.0, 0.25).unwrap();
        let noise = NoiseModel::None;
        let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
        let mut c = cfg(1);
        c.horizon = 200;
        c.clip_enabled = false;
        c.record_states = false;
        match run(&setup, &c) {
            Err(Error::NumericalFailure { t }) => {
                assert!(t > 1 && t < 200, "overflow strikes mid-run, got t={t}");
            }
            other => panic!("expected a numerical failure, got {other:?}"),
        }
    }

    #[test]
    fn clipping_bounds_every_step_displacement() {
        // With clipping on, each agent moves at most eta_t * lambda_t plus
        // the mixing pull; the mixing is an average, so states stay inside
        // the convex hull radius plus the accumulated clipped steps.
        let (problem, graph, schedule, noise) = small_setup();
        let setup = SimSetup { problem: &problem, graph: &graph, schedule: &schedule, noise: &noise };
        let out = run(&setup, &cfg(8)).unwrap();
        let mut budget = out.r1;
        for t in 1..=out.cfg.horizon {
            budget += schedule.step_size(t) * schedule.clip_level(t);
        }
        for xi in &out.final_states {
            assert!(
                linalg::norm(xi) <= budget + 1e-9,
                "state escaped the clipped-step envelope: {} > {budget}",
                linalg::norm(xi)
            );
        }
    }
}

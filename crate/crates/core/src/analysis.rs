//! Certification of the quantitative guarantees on recorded runs.
//!
//! Three families of checks:
//!
//! - **Consensus contraction.** For clipped runs every deviation from the
//!   network average obeys, deterministically,
//!
//!   ```text
//!   ||x_{i,t+1} - xbar_{t+1}|| <= n gamma beta^t R1
//!                               + n gamma sum_{l=1}^t beta^(t-l) lambda_l eta_l
//!   ```
//!
//!   because every clipped step is bounded by `eta_l lambda_l` and the
//!   mixing products contract entrywise at rate `beta`.
//!
//! - **Gradient growth.** Smoothness plus the triangle inequality give
//!
//!   ```text
//!   ||grad f_i(x_i,t)|| <= L ||x_i,t - xbar_t|| + L ||xbar_t - x*||
//!                        + ||grad f_i(x*)||
//!   ```
//!
//!   checked per agent and step, along with whether gradients stayed below
//!   half the clip level (the regime the clipping-error bounds assume).
//!
//! - **Clipping error moments.** Writing `theta = clip(grad + xi, lambda) -
//!   grad`, split into the centered part `theta_u = clip - E[clip]` and the
//!   bias `theta_b = E[clip] - grad`. Then `||theta_u|| <= 2 lambda` holds
//!   sample-wise with no conditions, and when `||grad|| <= lambda/2`:
//!
//!   ```text
//!   ||theta_b||     <= 4 sigma^p lambda^(1-p)
//!   E||theta_u||^2  <= 16 sigma^p lambda^(2-p)
//!   ```
//!
//!   verified by a two-pass Monte Carlo (mean first, deviations second) over
//!   per-sample substreams, so both passes see identical draws and the
//!   result is independent of thread count.

use crate::engine::{clip, RunResult, StepRecord};
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::GraphSchedule;
use crate::linalg;
use crate::noise::NoiseModel;
use crate::objective::Problem;
use crate::schedule::Schedule;
use crate::stream::substream;

/// Absolute tolerance on the deterministic trajectory bounds.
pub const TRAJECTORY_TOL: f64 = 1e-9;
/// Relative (in `lambda`) tolerance on the sample-wise clipping cap.
pub const CAP_TOL: f64 = 1e-12;
/// Multiplicative slack granted to the Monte Carlo moment estimates.
pub const MOMENT_SLACK: f64 = 1.2;
/// Monte Carlo work is split into fixed-size chunks summed in order, so the
/// reduction tree is the same for every thread count.
const MC_CHUNK: usize = 4096;

/// Outcome of sweeping one inequality over a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct BoundCheck {
    /// Number of (time, agent) pairs inspected.
    pub checked: usize,
    /// Pairs exceeding the bound by more than the tolerance.
    pub violations: usize,
    /// Largest `lhs - bound` seen (negative when everything is inside).
    pub worst_margin: f64,
    /// Time index attaining `worst_margin`.
    pub worst_t: Option<usize>,
}

impl BoundCheck {
    fn new() -> Self {
        BoundCheck { checked: 0, violations: 0, worst_margin: f64::NEG_INFINITY, worst_t: None }
    }

    fn observe(&mut self, margin: f64, t: usize, tol: f64) {
        self.checked += 1;
        if margin > self.worst_margin {
            self.worst_margin = margin;
            self.worst_t = Some(t);
        }
        if margin > tol {
            self.violations += 1;
        }
    }
}

fn full_resolution_states<'a>(
    run: &'a RunResult,
) -> Result<&'a [(usize, Vec<Vec<f64>>)]> {
    let states = run.states.as_deref().ok_or_else(|| {
        Error::InsufficientResolution("run was recorded without state snapshots".into())
    })?;
    let consecutive = run.cfg.stride == 1
        && states.len() == run.cfg.horizon
        && states.iter().enumerate().all(|(idx, (t, _))| *t == idx + 1);
    if !consecutive {
        return Err(Error::InsufficientResolution(format!(
            "consensus certification needs stride-1 snapshots covering t=1..={}, got {} snapshots at stride {}",
            run.cfg.horizon,
            states.len(),
            run.cfg.stride
        )));
    }
    Ok(states)
}

/// Sweeps the consensus-contraction bound over a stride-1 clipped run,
/// including the final states at `t = T + 1`.
pub fn verify_consensus_contraction(
    run: &RunResult,
    graph: &GraphSchedule,
    schedule: &Schedule,
) -> Result<BoundCheck> {
    if !run.cfg.clip_enabled {
        return Err(Error::InvalidArgument(
            "the consensus bound requires clipped steps; this run was unclipped".into(),
        ));
    }
    let states = full_resolution_states(run)?;
    let n = graph.n();
    if states[0].1.len() != n {
        return Err(Error::InvalidArgument(format!(
            "run has {} agents but the graph has {n}",
            states[0].1.len()
        )));
    }
    let contraction = graph.contraction();
    let (gamma, beta) = (contraction.gamma, contraction.beta);
    let prefactor = n as f64 * gamma;

    let mut check = BoundCheck::new();
    // Geometric sum over past steps, advanced once per time index:
    // tail(s) = sum_{l=1}^{s-1} beta^(s-1-l) lambda_l eta_l.
    let mut tail = 0.0;
    for s in 2..=run.cfg.horizon + 1 {
        tail = beta * tail + schedule.clip_level(s - 1) * schedule.step_size(s - 1);
        let bound = prefactor * (beta.powi((s - 1) as i32) * run.r1 + tail);
        let xs = if s <= run.cfg.horizon { &states[s - 1].1 } else { &run.final_states };
        let xbar = linalg::mean_rows(xs);
        for xi in xs {
            let margin = linalg::dist(xi, &xbar) - bound;
            check.observe(margin, s, TRAJECTORY_TOL);
        }
    }
    Ok(check)
}

/// Gradient-growth certification plus the half-clip-level regime report.
#[derive(Debug, Clone, Copy)]
pub struct GradientGrowthReport {
    pub check: BoundCheck,
    /// (time, agent) pairs where `||grad f_i(x_i,t)|| > lambda_t / 2`.
    pub half_clip_violations: usize,
    pub half_clip_ok: bool,
}

/// Sweeps the smoothness-based gradient bound over recorded snapshots (any
/// stride).
pub fn verify_gradient_growth(
    run: &RunResult,
    problem: &Problem,
    schedule: &Schedule,
) -> Result<GradientGrowthReport> {
    let states = run.states.as_deref().ok_or_else(|| {
        Error::InsufficientResolution("run was recorded without state snapshots".into())
    })?;
    if states.is_empty() {
        return Err(Error::InsufficientResolution("no snapshots recorded".into()));
    }
    let l = problem.lipschitz();
    let grad_opt = problem.grad_norms_at_opt();
    let x_star = problem.minimizer();
    let mut check = BoundCheck::new();
    let mut half_clip_violations = 0usize;
    for (t, xs) in states {
        let xbar = linalg::mean_rows(xs);
        let dist_opt = linalg::dist(&xbar, x_star);
        let half_level = 0.5 * schedule.clip_level(*t);
        for (i, xi) in xs.iter().enumerate() {
            let lhs = linalg::norm(&problem.agent(i).gradient(xi));
            let bound = l * linalg::dist(xi, &xbar) + l * dist_opt + grad_opt[i];
            check.observe(lhs - bound, *t, TRAJECTORY_TOL);
            if lhs > half_level {
                half_clip_violations += 1;
            }
        }
    }
    Ok(GradientGrowthReport {
        check,
        half_clip_violations,
        half_clip_ok: half_clip_violations == 0,
    })
}

// ---------------------------------------------------------------------------
// Clipping-error moments.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct ClipErrorReport {
    pub samples: usize,
    /// Samples with `||theta_u|| > 2 lambda (1 + CAP_TOL)`.
    pub cap_violations: usize,
    /// Largest `||theta_u|| - 2 lambda`.
    pub worst_cap_margin: f64,
    /// Whether `||grad|| <= lambda / 2` held, enabling the moment bounds.
    pub grad_within_half: bool,
    /// `||E[clip] - grad||` (Monte Carlo).
    pub bias_norm: f64,
    /// `4 sigma^p lambda^(1-p)`.
    pub bias_bound: f64,
    /// Mean of `||theta_u||^2` (Monte Carlo).
    pub second_moment: f64,
    /// `16 sigma^p lambda^(2-p)`.
    pub second_bound: f64,
    /// Both moment estimates within `MOMENT_SLACK` of their bounds; `None`
    /// when the gradient was too large for the bounds to apply.
    pub moments_ok: Option<bool>,
}

/// Two-pass Monte Carlo check of the clipping-error decomposition at a fixed
/// point. Sample `k` is regenerated from substream `(seed, k, 0)` in both
/// passes.
pub fn verify_clip_error(
    grad: &[f64],
    lambda: f64,
    noise: &NoiseModel,
    sigma: f64,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<ClipErrorReport> {
    noise.validate(p)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("clip level must be positive, got {lambda}")));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be >= 0, got {sigma}")));
    }
    if samples == 0 || grad.is_empty() || grad.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "need samples >= 1 and a finite nonempty gradient".into(),
        ));
    }
    let dim = grad.len();
    let clipped_at = |k: usize| -> Vec<f64> {
        let mut rng = substream(seed, k as u64, 0);
        let xi = noise.sample(dim, &mut rng);
        let noisy: Vec<f64> = grad.iter().zip(&xi).map(|(g, e)| g + e).collect();
        clip(&noisy, lambda)
    };
    let chunks = samples.div_ceil(MC_CHUNK);

    // Pass 1: the Monte Carlo mean of the clipped vector.
    let partial_sums = exec::map_indexed(chunks, |c| {
        let mut acc = vec![0.0; dim];
        for k in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(samples) {
            for (a, v) in acc.iter_mut().zip(clipped_at(k)) {
                *a += v;
            }
        }
        acc
    });
    let mut mean = vec![0.0; dim];
    for part in &partial_sums {
        for (m, v) in mean.iter_mut().zip(part) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= samples as f64;
    }

    // Pass 2: deviations from that mean.
    let per_chunk = exec::map_indexed(chunks, |c| {
        let mut worst = f64::NEG_INFINITY;
        let mut violations = 0usize;
        let mut sq_sum = 0.0;
        for k in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(samples) {
            let cl = clipped_at(k);
            let dev = linalg::dist(&cl, &mean);
            let margin = dev - 2.0 * lambda;
            worst = worst.max(margin);
            if margin > CAP_TOL * lambda {
                violations += 1;
            }
            sq_sum += dev * dev;
        }
        (worst, violations, sq_sum)
    });
    let mut worst_cap_margin = f64::NEG_INFINITY;
    let mut cap_violations = 0usize;
    let mut second_moment = 0.0;
    for (w, v, s) in &per_chunk {
        worst_cap_margin = worst_cap_margin.max(*w);
        cap_violations += v;
        second_moment += s;
    }
    second_moment /= samples as f64;

    let bias_norm = {
        let b: Vec<f64> = mean.iter().zip(grad).map(|(m, g)| m - g).collect();
        linalg::norm(&b)
    };
    let sigma_p = sigma.powf(p);
    let bias_bound = 4.0 * sigma_p * lambda.powf(1.0 - p);
    let second_bound = 16.0 * sigma_p * lambda.powf(2.0 - p);
    let grad_within_half = linalg::norm(grad) <= 0.5 * lambda;
    let moments_ok = grad_within_half.then(|| {
        bias_norm <= MOMENT_SLACK * bias_bound && second_moment <= MOMENT_SLACK * second_bound
    });
    Ok(ClipErrorReport {
        samples,
        cap_violations,
        worst_cap_margin,
        grad_within_half,
        bias_norm,
        bias_bound,
        second_moment,
        second_bound,
        moments_ok,
    })
}

// ---------------------------------------------------------------------------
// Accumulator thresholds and normalizer diagnostics.
// ---------------------------------------------------------------------------

/// Excursion levels the noise-term accumulator should respect with
/// probability `1 - delta`.
#[derive(Debug, Clone, Copy)]
pub struct AccumulatorThresholds {
    /// `5/4 Delta1 + ln(1/delta)`.
    pub primary: f64,
    /// `9/4 Delta1 + a0`.
    pub alternate: f64,
}

pub fn accumulator_thresholds(delta1: f64, delta: f64) -> AccumulatorThresholds {
    let log_term = (1.0 / delta).ln();
    AccumulatorThresholds {
        primary: 1.25 * delta1 + log_term,
        alternate: 2.25 * delta1 + log_term.max(1.0),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NormalizerReport {
    pub checked: usize,
    /// Times where `z_t` increased.
    pub monotonicity_violations: usize,
    /// Times where `z_t (a0 + 4 max delta) != 1` beyond 1e-12; only
    /// computable on full-resolution records (the running max needs every
    /// step).
    pub consistency_violations: Option<usize>,
    pub worst_error: f64,
}

/// Diagnoses the recorded normalizer column.
pub fn verify_normalizer(records: &[StepRecord], delta: f64) -> Result<NormalizerReport> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to diagnose".into()));
    }
    let full_resolution = records.iter().enumerate().all(|(idx, r)| r.t == idx + 1);
    let a0 = (1.0 / delta).ln().max(1.0);
    let mut monotonicity_violations = 0usize;
    let mut consistency_violations = full_resolution.then_some(0usize);
    let mut worst = 0.0f64;
    let mut prev_z = f64::INFINITY;
    let mut max_delta = 0.0f64;
    for r in records {
        if r.z_t > prev_z * (1.0 + 1e-15) {
            monotonicity_violations += 1;
            worst = worst.max(r.z_t - prev_z);
        }
        prev_z = r.z_t;
        if let Some(v) = consistency_violations.as_mut() {
            max_delta = max_delta.max(r.delta_t);
            let err = (r.z_t * (a0 + 4.0 * max_delta) - 1.0).abs();
            worst = worst.max(err);
            if err > 1e-12 {
                *v += 1;
            }
        }
    }
    Ok(NormalizerReport {
        checked: records.len(),
        monotonicity_violations,
        consistency_violations,
        worst_error: worst,
    })
}

// ---------------------------------------------------------------------------
// Ensemble summaries.
// ---------------------------------------------------------------------------

/// A telemetry column, for ensemble summaries and plotting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordField {
    FbarGap,
    RunAvgGap,
    ConsensusMax,
    ZT,
    DeltaT,
    ThetaAcc,
}

impl RecordField {
    pub const ALL: [RecordField; 6] = [
        RecordField::FbarGap,
        RecordField::RunAvgGap,
        RecordField::ConsensusMax,
        RecordField::ZT,
        RecordField::DeltaT,
        RecordField::ThetaAcc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RecordField::FbarGap => "fbar_gap",
            RecordField::RunAvgGap => "run_avg_gap",
            RecordField::ConsensusMax => "consensus_max",
            RecordField::ZT => "z_t",
            RecordField::DeltaT => "delta_t",
            RecordField::ThetaAcc => "theta_acc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|f| f.name() == s)
    }

    pub fn extract(&self, r: &StepRecord) -> f64 {
        match self {
            RecordField::FbarGap => r.fbar_gap,
            RecordField::RunAvgGap => r.run_avg_gap,
            RecordField::ConsensusMax => r.consensus_max,
            RecordField::ZT => r.z_t,
            RecordField::DeltaT => r.delta_t,
            RecordField::ThetaAcc => r.theta_acc,
        }
    }
}

/// Per-time quantiles of one column across runs. Requires at least 10 runs
/// recorded on identical time grids; quantile `q` picks the sorted value at
/// index `round(q (n-1))`.
pub fn ensemble_quantiles(
    runs: &[Vec<StepRecord>],
    field: RecordField,
    qs: &[f64],
) -> Result<Vec<(usize, Vec<f64>)>> {
    if runs.len() < 10 {
        return Err(Error::InvalidArgument(format!(
            "ensemble summaries need at least 10 runs, got {}",
            runs.len()
        )));
    }
    if qs.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(Error::InvalidArgument("quantiles must lie in [0, 1]".into()));
    }
    let grid: Vec<usize> = runs[0].iter().map(|r| r.t).collect();
    for (ri, run) in runs.iter().enumerate() {
        if run.iter().map(|r| r.t).ne(grid.iter().copied()) {
            return Err(Error::MalformedInput(format!(
                "run {ri} is recorded on a different time grid"
            )));
        }
    }
    let mut out = Vec::with_capacity(grid.len());
    for (row, &t) in grid.iter().enumerate() {
        let mut vals: Vec<f64> = runs.iter().map(|run| field.extract(&run[row])).collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        let picks = qs
            .iter()
            .map(|q| vals[(q * (vals.len() - 1) as f64).round() as usize])
            .collect();
        out.push((t, picks));
    }
    Ok(out)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "slope fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !(x.is_finite() && y.is_finite() && *x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidArgument(
            "slope fit needs positive finite coordinates".into(),
        ));
    }
    let n = points.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (x, y) in points {
        sx += x.ln();
        sy += y.ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut cov, mut var) = (0.0, 0.0);
    for (x, y) in points {
        let dx = x.ln() - mx;
        cov += dx * (y.ln() - my);
        var += dx * dx;
    }
    if var == 0.0 {
        return Err(Error::InvalidArgument("slope fit needs at least two distinct x".into()));
    }
    Ok(cov / var)
}

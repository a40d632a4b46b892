//! Step-size and clip-level schedules plus their feasibility conditions.
//!
//! The method runs with a polynomially decaying step size and a polynomially
//! growing clip level,
//!
//! ```text
//! eta_t    = 1 / (m * (ln t + b1)^2 * t^kappa)
//! lambda_t = lambda * t^alpha
//! ```
//!
//! A parameter set is *admissible* for a problem with smoothness `L`, noise
//! moment bound `E||xi||^p <= sigma^p`, mixing constants `(gamma, beta)` over
//! `n` agents, initial radius `R1`, initial distance `Delta1`, and confidence
//! `delta` when five clauses hold (`a0 = max(1, ln(1/delta))`):
//!
//! ```text
//! 1. kappa >= max(alpha + 1/2, 1 - (p-1) alpha)
//! 2. A C(2a,3k) lambda^2 + (C(2a,2k) n + E m) m <= m^3 Delta1^2
//! 3. lambda >= 2L (9 Delta1 + 5 a0) + 2 L D + 2 Bstar
//! 4. m >= Delta1^-1 lambda^(1-p) sigma^p C((1-p)a, k)
//! 5. m >= 6 Delta1^-1/2 lambda^(1-p/2) sigma^(p/2) C(2a,2k)^1/2
//! ```
//!
//! with `A = 4 L n^2 gamma^2 / (1-beta)^2`, `E = 4 L n^2 gamma^2 R1^2 /
//! (1-beta)`, `D = n gamma R1 + n gamma lambda / ((1-beta) m)`, and the
//! series constant
//!
//! ```text
//! C(a, b) = sum_{t>=1} 1 / (t^(b-a) (ln t + 1)^2)
//! ```
//!
//! which converges iff `b - a >= 1` (the boundary case included, thanks to
//! the squared log). [`series_constant`] returns a certified two-sided
//! bracket; the checker uses the upper end everywhere, so a reported pass is
//! sound. Clause 1 is checked with a tiny floating-point slack because two
//! natural exponent choices sit exactly on its boundary.

use crate::error::{Error, Result};
use crate::noise::check_moment_order;

/// Floating-point slack on the exponent clause; equality is admissible.
pub const EXPONENT_TOL: f64 = 1e-12;
/// `b - a` below `1 - SERIES_TOL` is treated as divergent.
const SERIES_TOL: f64 = 1e-9;
/// Relative width at which the series bracket stops refining.
const SERIES_REL_WIDTH: f64 = 1e-6;

/// Decaying step size and growing clip level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub m: f64,
    pub b1: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl Schedule {
    pub fn new(m: f64, b1: f64, kappa: f64, lambda: f64, alpha: f64) -> Result<Self> {
        for (name, v, lo_open) in [
            ("m", m, true),
            ("b1", b1, true),
            ("kappa", kappa, false),
            ("lambda", lambda, true),
            ("alpha", alpha, false),
        ] {
            if !v.is_finite() || v < 0.0 || (lo_open && v == 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "schedule parameter {name} must be finite and {} 0, got {v}",
                    if lo_open { ">" } else { ">=" }
                )));
            }
        }
        Ok(Self { m, b1, kappa, lambda, alpha })
    }

    /// `eta_t` for `t >= 1`.
    pub fn step_size(&self, t: usize) -> f64 {
        assert!(t >= 1, "time indices are 1-based");
        let tf = t as f64;
        1.0 / (self.m * (tf.ln() + self.b1).powi(2) * tf.powf(self.kappa))
    }

    /// `lambda_t` for `t >= 1`.
    pub fn clip_level(&self, t: usize) -> f64 {
        assert!(t >= 1, "time indices are 1-based");
        self.lambda * (t as f64).powf(self.alpha)
    }
}

/// Exponent pair `(alpha, kappa)` that balances clauses 4 and 5; sits on the
/// boundary of both branches of clause 1.
pub fn suggested_exponents(p: f64) -> (f64, f64) {
    (1.0 / (2.0 * p), 0.5 + 1.0 / (2.0 * p))
}

/// Exponent pair `(alpha, kappa)` with a slower clip growth; boundary case
/// of the second branch of clause 1.
pub fn alternate_exponents(p: f64) -> (f64, f64) {
    (1.0 / (3.0 * p), (2.0 * p + 1.0) / (3.0 * p))
}

/// `kappa - max(alpha + 1/2, 1 - (p-1) alpha)`; clause 1 holds when this is
/// at least `-EXPONENT_TOL`.
pub fn exponent_margin(p: f64, alpha: f64, kappa: f64) -> f64 {
    kappa - (alpha + 0.5).max(1.0 - (p - 1.0) * alpha)
}

// ---------------------------------------------------------------------------
// Series constant with a certified bracket.
// ---------------------------------------------------------------------------

/// Closed interval guaranteed to contain a real number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Certified bracket for `C(a, b) = sum_{t>=1} t^-(b-a) (ln t + 1)^-2`.
///
/// The summand is decreasing, so the tail after `M` terms lies between the
/// integrals from `M+1` and from `M`; the partial sum plus that two-sided
/// tail gives a bracket whose width shrinks as `M` doubles. Stops once the
/// relative width is below 1e-6 (or `M` hits 2^22). Returns
/// [`Error::DivergentSeries`] when `b - a < 1`.
pub fn series_constant(a: f64, b: f64) -> Result<Interval> {
    let c = b - a;
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("series exponent b - a = {c}")));
    }
    if c < 1.0 - SERIES_TOL {
        return Err(Error::DivergentSeries(c));
    }
    let c = c.max(1.0);
    let term = |t: usize| {
        let tf = t as f64;
        tf.powf(-c) / (tf.ln() + 1.0).powi(2)
    };
    let mut m: usize = 64;
    let mut partial: f64 = (1..=m).map(term).sum();
    loop {
        let (tail_hi, err_hi) = tail_integral(c, m as f64);
        let (tail_lo, err_lo) = tail_integral(c, (m + 1) as f64);
        let lo = partial + tail_lo - err_lo;
        let hi = partial + tail_hi + err_hi;
        if hi - lo <= SERIES_REL_WIDTH * hi || m >= (1 << 22) {
            return Ok(Interval { lo: lo.min(hi), hi });
        }
        for t in m + 1..=2 * m {
            partial += term(t);
        }
        m *= 2;
    }
}

/// `(integral, error bound)` of the summand over `[m, infinity)`.
///
/// Substituting `w = 1 / (ln t + 1)` turns the tail into the finite smooth
/// integral `int_0^(1/(ln m + 1)) exp(-s (1/w - 1)) dw` with `s = c - 1`;
/// at `c = 1` it collapses to the closed form `1 / (ln m + 1)`.
fn tail_integral(c: f64, m: f64) -> (f64, f64) {
    let u0 = m.ln() + 1.0;
    let s = c - 1.0;
    if s <= 0.0 {
        return (1.0 / u0, 0.0);
    }
    let g = |w: f64| {
        if w <= 0.0 {
            0.0
        } else {
            (s * (1.0 - 1.0 / w)).exp()
        }
    };
    let upper = 1.0 / u0;
    let tol = 1e-13 * upper;
    let mut err = 0.0;
    let (ga, gm, gb) = (g(0.0), g(0.5 * upper), g(upper));
    let whole = upper / 6.0 * (ga + 4.0 * gm + gb);
    let v = simpson(&g, 0.0, upper, ga, gm, gb, whole, tol, 48, &mut err);
    (v, err)
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    g: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    ga: f64,
    gm: f64,
    gb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (glm, grm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (ga + 4.0 * glm + gm);
    let right = (b - m) / 6.0 * (gm + 4.0 * grm + gb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        *err += diff.abs() / 15.0;
        return left + right + diff / 15.0;
    }
    simpson(g, a, m, ga, glm, gm, left, 0.5 * tol, depth - 1, err)
        + simpson(g, m, b, gm, grm, gb, right, 0.5 * tol, depth - 1, err)
}

// ---------------------------------------------------------------------------
// Admissibility checker.
// ---------------------------------------------------------------------------

/// Problem-side constants entering the admissibility clauses.
#[derive(Debug, Clone, Copy)]
pub struct ProblemConstants {
    pub n_agents: usize,
    /// Mixing bound prefactor (>= 1).
    pub gamma: f64,
    /// Mixing bound rate (in (0, 1)).
    pub beta: f64,
    /// Smoothness: max over agents of the local gradient Lipschitz constant.
    pub lipschitz: f64,
    /// `Bstar = max_i ||grad f_i(x*)||` at the global minimizer.
    pub grad_norm_at_opt: f64,
    /// `R1 = max_i ||x_{i,1}||`.
    pub init_radius: f64,
    /// `Delta1 = ||xbar_1 - x*||`.
    pub initial_distance: f64,
    /// Noise moment bound: `E||xi||^p <= sigma^p`.
    pub sigma: f64,
    pub p: f64,
    /// Confidence level: bounds hold with probability `1 - delta`.
    pub delta: f64,
}

impl ProblemConstants {
    pub fn validate(&self) -> Result<()> {
        check_moment_order(self.p)?;
        if self.n_agents < 2 {
            return Err(Error::InvalidArgument(format!(
                "need n >= 2 agents, got {}",
                self.n_agents
            )));
        }
        let positives = [
            ("gamma", self.gamma),
            ("lipschitz", self.lipschitz),
            ("initial_distance", self.initial_distance),
        ];
        for (name, v) in positives {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("grad_norm_at_opt", self.grad_norm_at_opt),
            ("init_radius", self.init_radius),
            ("sigma", self.sigma),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must lie in (0, 1), got {}",
                self.beta
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

    /// `a0 = max(1, ln(1/delta))`.
    pub fn a_zero(&self) -> f64 {
        (1.0 / self.delta).ln().max(1.0)
    }
}

/// One admissibility clause, as `lhs <= rhs` after normalization.
#[derive(Debug, Clone)]
pub struct ClauseCheck {
    pub label: &'static str,
    /// Quantity that must not exceed `rhs`.
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// True when practical mode left this clause out of the verdict.
    pub skipped: bool,
}

#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub clauses: Vec<ClauseCheck>,
    /// All non-skipped clauses satisfied.
    pub admissible: bool,
}

/// Checks all five clauses. `practical` excludes the transient-budget clause
/// (clause 2) from the verdict — it is hopeless at desk-scale `m` — while
/// still reporting its numbers. The checker upper-bounds every series
/// constant, so `admissible = true` is conservative. Requires `b1 >= 1`:
/// the series constants assume the log offset is at least one.
pub fn check_admissibility(
    schedule: &Schedule,
    pc: &ProblemConstants,
    practical: bool,
) -> Result<AdmissibilityReport> {
    pc.validate()?;
    if schedule.b1 < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "admissibility checker needs b1 >= 1, got {}",
            schedule.b1
        )));
    }
    let (alpha, kappa, m, lambda) =
        (schedule.alpha, schedule.kappa, schedule.m, schedule.lambda);
    let (n, l) = (pc.n_agents as f64, pc.lipschitz);
    let (gamma, beta) = (pc.gamma, pc.beta);
    let (d1, r1, a0) = (pc.initial_distance, pc.init_radius, pc.a_zero());

    let margin = exponent_margin(pc.p, alpha, kappa);
    let mut clauses = vec![ClauseCheck {
        label: "exponents",
        lhs: (alpha + 0.5).max(1.0 - (pc.p - 1.0) * alpha),
        rhs: kappa,
        satisfied: margin >= -EXPONENT_TOL,
        skipped: false,
    }];

    // Series constants; a divergent one fails its clause outright.
    let c_23 = series_constant(2.0 * alpha, 3.0 * kappa);
    let c_22 = series_constant(2.0 * alpha, 2.0 * kappa);
    let c_bias = series_constant((1.0 - pc.p) * alpha, kappa);
    let upper = |r: &Result<Interval>| r.as_ref().map(|iv| iv.hi).unwrap_or(f64::INFINITY);

    let big_a = 4.0 * l * n * n * gamma * gamma / ((1.0 - beta) * (1.0 - beta));
    let big_e = 4.0 * l * n * n * gamma * gamma * r1 * r1 / (1.0 - beta);
    clauses.push(ClauseCheck {
        label: "transient-budget",
        lhs: big_a * upper(&c_23) * lambda * lambda + (upper(&c_22) * n + big_e * m) * m,
        rhs: m * m * m * d1 * d1,
        satisfied: false,
        skipped: practical,
    });
    let i = clauses.len() - 1;
    clauses[i].satisfied = clauses[i].lhs <= clauses[i].rhs;

    let big_d = n * gamma * r1 + n * gamma * lambda / ((1.0 - beta) * m);
    let clip_floor = 2.0 * l * (9.0 * d1 + 5.0 * a0) + 2.0 * l * big_d + 2.0 * pc.grad_norm_at_opt;
    clauses.push(ClauseCheck {
        label: "clip-floor",
        lhs: clip_floor,
        rhs: lambda,
        satisfied: clip_floor <= lambda,
        skipped: false,
    });

    let bias_floor = lambda.powf(1.0 - pc.p) * pc.sigma.powf(pc.p) * upper(&c_bias) / d1;
    clauses.push(ClauseCheck {
        label: "moment-bias",
        lhs: bias_floor,
        rhs: m,
        satisfied: bias_floor <= m,
        skipped: false,
    });

    let dev_floor = 6.0 * lambda.powf(1.0 - 0.5 * pc.p) * pc.sigma.powf(0.5 * pc.p)
        * upper(&c_22).sqrt()
        / d1.sqrt();
    clauses.push(ClauseCheck {
        label: "moment-deviation",
        lhs: dev_floor,
        rhs: m,
        satisfied: dev_floor <= m,
        skipped: false,
    });

    let admissible = clauses.iter().all(|c| c.skipped || c.satisfied);
    Ok(AdmissibilityReport { clauses, admissible })
}

/// Searches for an admissible `(m, lambda)` at the suggested exponents and
/// `b1 = 1`, scanning `m` over ascending powers of two. For each `m` small
/// enough that the clip-floor clause has a solution (its right side grows
/// only linearly in `lambda` with slope `2 L n gamma / ((1-beta) m) < 1`),
/// the minimal `lambda` solves a linear fixed point; it is rounded up to a
/// power of two and the full checker decides. Returns the first admissible
/// pair, or [`Error::Infeasible`] when none exists up to `2^60`.
pub fn suggest_params(pc: &ProblemConstants) -> Result<(Schedule, AdmissibilityReport)> {
    pc.validate()?;
    let (alpha, kappa) = suggested_exponents(pc.p);
    let (n, l) = (pc.n_agents as f64, pc.lipschitz);
    let base = 2.0 * l * (9.0 * pc.initial_distance + 5.0 * pc.a_zero())
        + 2.0 * l * n * pc.gamma * pc.init_radius
        + 2.0 * pc.grad_norm_at_opt;
    for j in 0..=60u32 {
        let m = (2.0f64).powi(j as i32);
        let slope = 2.0 * l * n * pc.gamma / ((1.0 - pc.beta) * m);
        if slope >= 1.0 {
            continue;
        }
        let lambda_min = base / (1.0 - slope);
        let exp = lambda_min.log2().ceil();
        if exp.abs() > 60.0 {
            continue;
        }
        let lambda = (2.0f64).powi(exp as i32);
        let schedule = Schedule::new(m, 1.0, kappa, lambda, alpha)?;
        let report = check_admissibility(&schedule, pc, false)?;
        if report.admissible {
            return Ok((schedule, report));
        }
    }
    Err(Error::Infeasible(
        "no power-of-two (m, lambda) up to 2^60 satisfies all admissibility clauses".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk_schedule() -> Schedule {
        Schedule::new(0.2, 1.0, 0.75, 2.0, 0.25).unwrap()
    }

    #[test]
    fn step_size_and_clip_level_at_t1() {
        let s = desk_schedule();
        assert!((s.step_size(1) - 5.0).abs() < 1e-12, "eta_1 = {}", s.step_size(1));
        assert!((s.clip_level(1) - 2.0).abs() < 1e-15);
        // Heavier damping: m = 35, b1 = 4 gives eta_1 = 1/560.
        let heavy = Schedule::new(35.0, 4.0, 0.75, 100.0, 0.25).unwrap();
        assert!((heavy.step_size(1) - 1.0 / 560.0).abs() < 1e-15);
    }

    #[test]
    fn step_size_against_direct_evaluation() {
        let s = desk_schedule();
        let t = 17usize;
        let expect = 1.0 / (0.2 * ((t as f64).ln() + 1.0).powi(2) * (t as f64).powf(0.75));
        assert_eq!(s.step_size(t), expect);
        assert_eq!(s.clip_level(t), 2.0 * (t as f64).powf(0.25));
    }

    #[test]
    fn schedules_are_monotone() {
        let s = Schedule::new(0.7, 0.5, 0.6, 3.0, 0.2).unwrap();
        for t in 1..200usize {
            assert!(s.step_size(t + 1) < s.step_size(t), "eta must decay at t={t}");
            assert!(s.clip_level(t + 1) > s.clip_level(t), "lambda must grow at t={t}");
        }
    }

    #[test]
    fn nonpositive_parameters_are_rejected() {
        assert!(Schedule::new(0.0, 1.0, 0.75, 2.0, 0.25).is_err());
        assert!(Schedule::new(0.2, 0.0, 0.75, 2.0, 0.25).is_err());
        assert!(Schedule::new(0.2, 1.0, 0.75, f64::NAN, 0.25).is_err());
        assert!(Schedule::new(0.2, 1.0, 0.75, 2.0, 0.0).is_ok(), "constant clip is allowed");
    }

    #[test]
    fn series_bracket_matches_reference_value() {
        // b - a = 2: partial sum to t = 10 is already ~1.1390 and the full
        // series sits between 1.13 and 1.16.
        let iv = series_constant(0.0, 2.0).unwrap();
        assert!(iv.lo >= 1.139 && iv.hi <= 1.16, "bracket [{}, {}]", iv.lo, iv.hi);
        assert!(iv.width() <= SERIES_REL_WIDTH * iv.hi * 1.0001);
    }

    #[test]
    fn series_boundary_case_converges() {
        // b - a = 1 converges only thanks to the squared log factor.
        let iv = series_constant(0.5, 1.5).unwrap();
        assert!(iv.lo > 1.0 && iv.hi < 4.0, "bracket [{}, {}]", iv.lo, iv.hi);
        assert!(iv.width() <= SERIES_REL_WIDTH * iv.hi * 1.0001);
    }

    #[test]
    fn series_below_boundary_diverges() {
        match series_constant(0.0, 0.9) {
            Err(Error::DivergentSeries(c)) => assert!((c - 0.9).abs() < 1e-12),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn series_bracket_contains_brute_force_refinement() {
        for (a, b) in [(0.0, 2.0), (0.5, 1.5), (0.6, 2.1)] {
            let iv = series_constant(a, b).unwrap();
            let c = b - a;
            let cut = 3_000_000usize;
            let brute: f64 = (1..=cut)
                .map(|t| {
                    let tf = t as f64;
                    tf.powf(-c) / (tf.ln() + 1.0).powi(2)
                })
                .sum();
            // Coarse tail bound valid for any c >= 1: sum_{t>cut} <= 1/(ln cut + 1).
            let tail_cap = 1.0 / ((cut as f64).ln() + 1.0);
            assert!(
                brute <= iv.hi && iv.lo <= brute + tail_cap,
                "partial sum {brute} incompatible with bracket [{}, {}] for c={c}",
                iv.lo,
                iv.hi
            );
        }
    }

    #[test]
    fn exponent_clause_boundary_pairs_pass() {
        for p in [1.1, 1.5, 2.0] {
            for (alpha, kappa) in [suggested_exponents(p), alternate_exponents(p)] {
                let m = exponent_margin(p, alpha, kappa);
                assert!(
                    m >= -EXPONENT_TOL,
                    "boundary pair (alpha={alpha}, kappa={kappa}) at p={p}: margin {m}"
                );
            }
        }
        assert!(exponent_margin(1.5, 0.25, 0.6) < -1e-3, "slow decay must fail");
    }

    fn ring_constants() -> ProblemConstants {
        // Switching ring over 20 agents, eta = 0.2, window 4.
        let q: f64 = 1.0 - 0.2 / 1600.0;
        ProblemConstants {
            n_agents: 20,
            gamma: q.powi(-2),
            beta: q.powf(0.25),
            lipschitz: 3.0,
            grad_norm_at_opt: 1.0,
            init_radius: 1.0,
            initial_distance: 7.0,
            sigma: 2.0,
            p: 1.5,
            delta: 0.1,
        }
    }

    #[test]
    fn suggested_params_pass_their_own_check() {
        let pc = ring_constants();
        let (s, report) = suggest_params(&pc).unwrap();
        assert!(report.admissible);
        assert_eq!((s.alpha, s.kappa), suggested_exponents(1.5));
        assert_eq!(s.m.log2().fract(), 0.0, "m = {} must be a power of two", s.m);
        assert_eq!(s.lambda.log2().fract(), 0.0, "lambda = {}", s.lambda);
        // Independent re-check, and minimality within the scanned grid: half
        // the suggested m must fail.
        let again = check_admissibility(&s, &pc, false).unwrap();
        assert!(again.admissible);
        let smaller = Schedule::new(s.m / 2.0, 1.0, s.kappa, s.lambda, s.alpha).unwrap();
        let r = check_admissibility(&smaller, &pc, false).unwrap();
        assert!(!r.admissible, "scan must have returned the first admissible m");
    }

    #[test]
    fn absurd_problem_is_infeasible() {
        let mut pc = ring_constants();
        pc.lipschitz = 1e20;
        match suggest_params(&pc) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn practical_mode_skips_only_the_transient_budget() {
        // Shrinking the initial distance starves clause 2's right side while
        // leaving every other clause satisfiable.
        let mut pc = ring_constants();
        pc.initial_distance = 0.5;
        let s = Schedule::new((2.0f64).powi(22), 1.0, 5.0 / 6.0, 4096.0, 1.0 / 3.0).unwrap();
        let full = check_admissibility(&s, &pc, false).unwrap();
        let practical = check_admissibility(&s, &pc, true).unwrap();
        assert!(!full.admissible, "transient budget must fail at this distance");
        assert_eq!(
            full.clauses.iter().filter(|c| !c.satisfied).count(),
            1,
            "only clause 2 fails: {:?}",
            full.clauses
        );
        assert!(practical.admissible, "practical verdict ignores clause 2");
        assert_eq!(practical.clauses[1].label, "transient-budget");
        assert!(practical.clauses[1].skipped && !practical.clauses[1].satisfied);
    }

    #[test]
    fn checker_rejects_small_log_offset() {
        let pc = ring_constants();
        let s = Schedule::new(1.0, 0.5, 0.875, 2.0, 1.0 / 3.0).unwrap();
        assert!(check_admissibility(&s, &pc, false).is_err());
    }
}

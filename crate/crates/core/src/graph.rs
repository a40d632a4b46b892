//! Time-varying mixing graphs.
//!
//! A schedule is a periodic sequence of row- and column-stochastic weight
//! matrices over `n` agents. Entry `w[i][j]` is the weight agent `i` places
//! on agent `j`'s state when mixing, so edges point receiver <- sender.
//!
//! A schedule is valid when, for every time `t >= 1`:
//! - every positive entry and every diagonal entry is at least the weight
//!   floor `eta`;
//! - rows and columns sum to one (tolerance 1e-12 on stored matrices, 1e-10
//!   after products);
//! - the union of edge sets over the window `[t, t+B)` is strongly connected.
//!
//! For such schedules the backward product `Phi(k, s) = W_{k-1} ... W_s`
//! mixes geometrically: every entry approaches `1/n` with
//!
//! ```text
//! |Phi(k,s)[i][j] - 1/n| <= gamma * beta^(k-s)
//! gamma = (1 - eta/(4 n^2))^(-2)
//! beta  = (1 - eta/(4 n^2))^(1/B)
//! ```
//!
//! `verify_lemma1` checks that bound empirically over sampled windows.

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg;
use crate::stream::substream;
use rand::Rng;

/// Row-stochastic mixing weights for one time index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    /// Wraps a row-major `n x n` block. Shape and finiteness are checked
    /// here; stochasticity and the weight floor are checked by
    /// [`GraphSchedule::validate`].
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::MalformedInput(format!(
                "weight matrix must be {n} x {n}, got {} entries",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::MalformedInput(format!(
                "non-finite weight at ({}, {})",
                bad / n,
                bad % n
            )));
        }
        Ok(Self { n, w: entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.w
    }

    /// Convex combination `eta * I + (1 - eta) * P` of the identity and the
    /// permutation `perm` (as a map sender -> receiver). Doubly stochastic by
    /// construction with weight floor `min(eta, 1 - eta)`.
    fn lazy_permutation(n: usize, perm: &[usize], eta: f64) -> Self {
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            w[i * n + i] = eta;
        }
        for (sender, &receiver) in perm.iter().enumerate() {
            w[receiver * n + sender] += 1.0 - eta;
        }
        Self { n, w }
    }

    fn max_stochasticity_error(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            let row: f64 = self.w[i * n..(i + 1) * n].iter().sum();
            worst = worst.max((row - 1.0).abs());
        }
        for j in 0..n {
            let col: f64 = (0..n).map(|i| self.w[i * n + j]).sum();
            worst = worst.max((col - 1.0).abs());
        }
        worst
    }

    /// Worst floor violation: positive entries below `eta` or a diagonal
    /// entry below `eta`. Returns the offending amount, 0 when clean.
    fn floor_violation(&self, eta: f64) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = self.w[i * n + j];
                if (v > 0.0 || i == j) && v < eta {
                    worst = worst.max(eta - v);
                }
            }
        }
        worst
    }
}

/// Constants of the geometric mixing bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionConstants {
    pub gamma: f64,
    pub beta: f64,
}

impl ContractionConstants {
    pub fn new(n: usize, eta: f64, window_b: usize) -> Self {
        let q = 1.0 - eta / (4.0 * (n * n) as f64);
        ContractionConstants {
            gamma: q.powi(-2),
            beta: q.powf(1.0 / window_b as f64),
        }
    }
}

/// Which validity clause a schedule violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    WeightFloor,
    DoublyStochastic,
    Connectivity,
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Clause::WeightFloor => "weight floor",
            Clause::DoublyStochastic => "double stochasticity",
            Clause::Connectivity => "window connectivity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub clause: Clause,
    pub t: usize,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub pass: bool,
    pub violation: Option<Violation>,
}

/// Report of a sampled check of the mixing bound.
#[derive(Debug, Clone)]
pub struct Lemma1Report {
    /// Number of `(k, s, i, j)` tuples inspected.
    pub samples: usize,
    /// Tuples where `|Phi[i][j] - 1/n|` exceeded the bound by more than 1e-10.
    pub violations: usize,
    /// Largest `|Phi[i][j] - 1/n| - gamma * beta^(k-s)` seen (negative when
    /// every deviation sits strictly inside the bound).
    pub worst_margin: f64,
    /// `(s, k, i, j)` attaining `worst_margin`.
    pub worst_at: Option<(usize, usize, usize, usize)>,
}

/// Periodic schedule of mixing matrices with declared floor and window.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSchedule {
    n: usize,
    weight_floor: f64,
    window_b: usize,
    matrices: Vec<WeightMatrix>,
}

/// Tolerance on row/column sums of stored matrices.
const STORED_TOL: f64 = 1e-12;
/// Tolerance on row/column sums of transition products.
const PRODUCT_TOL: f64 = 1e-10;
/// Slack allowed when comparing deviations against the mixing bound.
const LEMMA1_TOL: f64 = 1e-10;

impl GraphSchedule {
    pub fn new(
        n: usize,
        weight_floor: f64,
        window_b: usize,
        matrices: Vec<WeightMatrix>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need n >= 2 agents, got {n}")));
        }
        if !(weight_floor > 0.0 && weight_floor < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "weight floor must lie in (0, 1), got {weight_floor}"
            )));
        }
        if window_b == 0 {
            return Err(Error::InvalidArgument("window B must be >= 1".into()));
        }
        if matrices.is_empty() {
            return Err(Error::InvalidArgument("schedule needs at least one matrix".into()));
        }
        if let Some(m) = matrices.iter().find(|m| m.n != n) {
            return Err(Error::MalformedInput(format!(
                "matrix of size {} in a schedule over {n} agents",
                m.n
            )));
        }
        Ok(Self { n, weight_floor, window_b, matrices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight_floor(&self) -> f64 {
        self.weight_floor
    }

    pub fn window_b(&self) -> usize {
        self.window_b
    }

    /// Number of stored matrices; times beyond it repeat cyclically.
    pub fn period(&self) -> usize {
        self.matrices.len()
    }

    /// Mixing matrix for time `t >= 1`.
    pub fn matrix(&self, t: usize) -> &WeightMatrix {
        assert!(t >= 1, "time indices are 1-based");
        &self.matrices[(t - 1) % self.matrices.len()]
    }

    /// Same schedule with a different declared window `B`.
    pub fn with_window(&self, window_b: usize) -> Result<Self> {
        Self::new(self.n, self.weight_floor, window_b, self.matrices.clone())
    }

    pub fn contraction(&self) -> ContractionConstants {
        ContractionConstants::new(self.n, self.weight_floor, self.window_b)
    }

    /// Ring split into `b` arc segments. Matrix `g` rotates one contiguous
    /// block of the ring (block cycle: the arc's edges plus a closing edge)
    /// and fixes everyone else, as `eta * I + (1 - eta) * P`. The blocks
    /// jointly cover every ring edge, so each window of `b` consecutive
    /// matrices is strongly connected while no single matrix is (for b >= 2
    /// and n > block size).
    pub fn switching_ring(n: usize, b: usize, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "switching ring needs eta in (0, 0.5], got {eta}"
            )));
        }
        if n < 2 || b == 0 {
            return Err(Error::InvalidArgument(format!(
                "switching ring needs n >= 2 and b >= 1, got n={n}, b={b}"
            )));
        }
        let mut matrices = Vec::with_capacity(b);
        for g in 0..b {
            let lo = g * n / b;
            let hi = (g + 1) * n / b;
            let mut perm: Vec<usize> = (0..n).collect();
            if hi - lo >= n {
                // Whole ring in one block: already a cycle, no closing edge.
                for i in 0..n {
                    perm[i] = (i + 1) % n;
                }
            } else {
                for i in lo..hi {
                    perm[i] = (i + 1) % n;
                }
                if hi > lo {
                    perm[hi % n] = lo;
                }
            }
            matrices.push(WeightMatrix::lazy_permutation(n, &perm, eta));
        }
        Self::new(n, eta, b, matrices)
    }

    /// Constant complete mixing `W = (1/n) 1 1^T`, floor `1/n`, window 1.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need n >= 2 agents, got {n}")));
        }
        let w = vec![1.0 / n as f64; n * n];
        Self::new(n, 1.0 / n as f64, 1, vec![WeightMatrix::new(n, w)?])
    }

    /// Random valid schedule: each matrix is a lazy convex combination of the
    /// identity and one or two random permutations, with the full ring
    /// permutation injected at every time `t = 1 mod b` so each length-`b`
    /// window is strongly connected. All mixture weights are at least `eta`.
    pub fn random(n: usize, b: usize, eta: f64, period: usize, seed: u64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "random schedule needs eta in (0, 0.5], got {eta}"
            )));
        }
        if n < 2 || b == 0 || period < b {
            return Err(Error::InvalidArgument(format!(
                "random schedule needs n >= 2, b >= 1, period >= b; got n={n}, b={b}, period={period}"
            )));
        }
        let ring: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let mut matrices = Vec::with_capacity(period);
        for t in 0..period {
            let mut rng = substream(seed, t as u64, 0);
            let p1 = if t % b == 0 { ring.clone() } else { random_permutation(n, &mut rng) };
            let w = if eta <= 1.0 / 3.0 {
                // Room for three terms: c0 I + c1 P1 + c2 P2, each weight >= eta.
                let p2 = random_permutation(n, &mut rng);
                let c1 = rng.random_range(eta..=(1.0 - eta) / 2.0);
                let c2 = rng.random_range(eta..=(1.0 - eta) / 2.0);
                let c0 = 1.0 - c1 - c2;
                let mut w = vec![0.0; n * n];
                for i in 0..n {
                    w[i * n + i] = c0;
                }
                for (s, &r) in p1.iter().enumerate() {
                    w[r * n + s] += c1;
                }
                for (s, &r) in p2.iter().enumerate() {
                    w[r * n + s] += c2;
                }
                WeightMatrix::new(n, w)?
            } else {
                let c0 = rng.random_range(eta..=1.0 - eta);
                WeightMatrix::lazy_permutation(n, &p1, c0)
            };
            matrices.push(w);
        }
        Self::new(n, eta, b, matrices)
    }

    /// Checks the floor, stochasticity, and window-connectivity clauses over
    /// `t` in `[1, horizon]`, reporting the first violation. Periodicity
    /// bounds the work: only the first `min(horizon, period)` time indices
    /// are distinct, and the earliest violation lies among them.
    pub fn validate(&self, horizon: usize) -> Result<ValidationReport> {
        if horizon < self.window_b {
            return Err(Error::InvalidArgument(format!(
                "horizon {horizon} shorter than connectivity window {}",
                self.window_b
            )));
        }
        let distinct = self.period().min(horizon);
        for t in 1..=distinct {
            let m = self.matrix(t);
            if let Some(bad) = m.w.iter().position(|v| *v < 0.0) {
                return Err(Error::MalformedInput(format!(
                    "negative weight at t={t}, entry ({}, {})",
                    bad / self.n,
                    bad % self.n
                )));
            }
            let fv = m.floor_violation(self.weight_floor);
            if fv > STORED_TOL {
                return Ok(ValidationReport {
                    pass: false,
                    violation: Some(Violation {
                        clause: Clause::WeightFloor,
                        t,
                        detail: format!(
                            "entry below floor {} by {fv:.3e}",
                            self.weight_floor
                        ),
                    }),
                });
            }
            let se = m.max_stochasticity_error();
            if se > STORED_TOL {
                return Ok(ValidationReport {
                    pass: false,
                    violation: Some(Violation {
                        clause: Clause::DoublyStochastic,
                        t,
                        detail: format!("row/column sum off by {se:.3e}"),
                    }),
                });
            }
        }
        for t in 1..=distinct {
            if !self.window_strongly_connected(t) {
                return Ok(ValidationReport {
                    pass: false,
                    violation: Some(Violation {
                        clause: Clause::Connectivity,
                        t,
                        detail: format!(
                            "union of edges over [{t}, {}] is not strongly connected",
                            t + self.window_b - 1
                        ),
                    }),
                });
            }
        }
        Ok(ValidationReport { pass: true, violation: None })
    }

    /// Union graph over `[t, t+B)` strongly connected? Depth-first
    /// reachability from node 0 in the union and in its reverse.
    fn window_strongly_connected(&self, t: usize) -> bool {
        let n = self.n;
        let mut fwd = vec![Vec::new(); n]; // sender -> receivers
        let mut rev = vec![Vec::new(); n];
        for l in t..t + self.window_b {
            let m = self.matrix(l);
            for i in 0..n {
                for j in 0..n {
                    if i != j && m.get(i, j) > 0.0 {
                        fwd[j].push(i);
                        rev[i].push(j);
                    }
                }
            }
        }
        reaches_all(&fwd, n) && reaches_all(&rev, n)
    }

    /// Backward transition product `Phi(k, s) = W_{k-1} ... W_s` as a
    /// row-major `n x n` matrix; `Phi(s, s) = I`.
    pub fn transition_product(&self, k: usize, s: usize) -> Result<Vec<f64>> {
        if s == 0 || k < s {
            return Err(Error::InvalidArgument(format!(
                "transition product needs 1 <= s <= k, got k={k}, s={s}"
            )));
        }
        let mut phi = linalg::identity(self.n);
        for l in s..k {
            phi = linalg::matmul(self.matrix(l).entries(), &phi, self.n);
        }
        Ok(phi)
    }

    /// Samples window starts and sweeps gaps `1..=max_gap`, comparing every
    /// entry deviation `|Phi[i][j] - 1/n|` against `gamma * beta^(k-s)`.
    /// The first `min(period, starts)` starts are deterministic (one per
    /// distinct matrix phase); the rest are drawn from `seed`.
    pub fn verify_lemma1(&self, max_gap: usize, starts: usize, seed: u64) -> Result<Lemma1Report> {
        if max_gap == 0 || starts == 0 {
            return Err(Error::InvalidArgument(
                "verify_lemma1 needs max_gap >= 1 and starts >= 1".into(),
            ));
        }
        let n = self.n;
        let ContractionConstants { gamma, beta } = self.contraction();
        let start_list: Vec<usize> = {
            let fixed = self.period().min(starts);
            let mut v: Vec<usize> = (1..=fixed).collect();
            let mut rng = substream(seed, 0, 0);
            while v.len() < starts {
                v.push(rng.random_range(1..=8 * self.period().max(2)));
            }
            v
        };
        let target = 1.0 / n as f64;
        let per_start = exec::map_indexed(start_list.len(), |idx| {
            let s = start_list[idx];
            let mut phi = linalg::identity(n);
            let mut worst = f64::NEG_INFINITY;
            let mut worst_at = None;
            let mut violations = 0usize;
            for gap in 1..=max_gap {
                phi = linalg::matmul(self.matrix(s + gap - 1).entries(), &phi, n);
                let bound = gamma * beta.powi(gap as i32);
                for i in 0..n {
                    for j in 0..n {
                        let margin = (phi[i * n + j] - target).abs() - bound;
                        if margin > worst {
                            worst = margin;
                            worst_at = Some((s, s + gap, i, j));
                        }
                        if margin > LEMMA1_TOL {
                            violations += 1;
                        }
                    }
                }
            }
            (worst, worst_at, violations)
        });
        let mut report = Lemma1Report {
            samples: start_list.len() * max_gap * n * n,
            violations: 0,
            worst_margin: f64::NEG_INFINITY,
            worst_at: None,
        };
        for (worst, at, v) in per_start {
            report.violations += v;
            if worst > report.worst_margin {
                report.worst_margin = worst;
                report.worst_at = at;
            }
        }
        Ok(report)
    }

    /// Serializes as a header `n period_b eta` followed by one `n x n` block
    /// of rows per stored matrix, blocks separated by blank lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.window_b, self.weight_floor);
        for m in &self.matrices {
            out.push('\n');
            for i in 0..self.n {
                let row: Vec<String> =
                    (0..self.n).map(|j| format!("{}", m.get(i, j))).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format. Times beyond the stored
    /// blocks extend cyclically. Errors carry 1-based line numbers.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty schedule file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header must be `n B eta`, got {} fields", fields.len()),
            });
        }
        let n: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: hline,
            msg: format!("bad agent count `{}`", fields[0]),
        })?;
        let b: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: hline,
            msg: format!("bad window `{}`", fields[1]),
        })?;
        let eta: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: hline,
            msg: format!("bad weight floor `{}`", fields[2]),
        })?;
        let rows: Vec<(usize, Vec<f64>)> = lines
            .map(|(lineno, l)| {
                let vals: Result<Vec<f64>> = l
                    .split_whitespace()
                    .map(|v| {
                        v.parse::<f64>().map_err(|_| Error::Parse {
                            line: lineno,
                            msg: format!("bad weight `{v}`"),
                        })
                    })
                    .collect();
                Ok((lineno, vals?))
            })
            .collect::<Result<_>>()?;
        if rows.is_empty() || rows.len() % n != 0 {
            return Err(Error::Parse {
                line: rows.last().map_or(hline, |r| r.0),
                msg: format!("expected a multiple of {n} matrix rows, got {}", rows.len()),
            });
        }
        let mut matrices = Vec::new();
        for block in rows.chunks(n) {
            let mut entries = Vec::with_capacity(n * n);
            for (lineno, row) in block {
                if row.len() != n {
                    return Err(Error::Parse {
                        line: *lineno,
                        msg: format!("row has {} entries, expected {n}", row.len()),
                    });
                }
                entries.extend_from_slice(row);
            }
            matrices.push(WeightMatrix::new(n, entries)?);
        }
        Self::new(n, eta, b, matrices)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn to_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Worst row/column-sum error of `Phi(k, s)`; products must stay doubly
    /// stochastic within 1e-10.
    pub fn product_stochasticity_error(phi: &[f64], n: usize) -> f64 {
        WeightMatrix { n, w: phi.to_vec() }.max_stochasticity_error()
    }

    pub fn product_tolerance() -> f64 {
        PRODUCT_TOL
    }
}

fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

fn reaches_all(adj: &[Vec<usize>], n: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_constants_small_case() {
        // n=2, eta=0.5, B=1: q = 1 - 0.5/16 = 0.96875.
        let c = ContractionConstants::new(2, 0.5, 1);
        assert!((c.beta - 0.96875).abs() < 1e-15, "beta {}", c.beta);
        assert!((c.gamma - 1.06555).abs() < 1e-4, "gamma {}", c.gamma);
        let c2 = ContractionConstants::new(2, 0.5, 2);
        assert!((c2.beta - 0.96875f64.sqrt()).abs() < 1e-15);
        assert!((c2.beta - 0.98425).abs() < 1e-4, "beta {}", c2.beta);
    }

    #[test]
    fn complete_uniform_schedule_validates() {
        let s = GraphSchedule::complete(4).unwrap();
        let r = s.validate(10).unwrap();
        assert!(r.pass, "uniform complete mixing is valid: {:?}", r.violation);
    }

    #[test]
    fn identity_schedule_fails_connectivity() {
        let n = 2;
        let s = GraphSchedule::new(
            n,
            0.5,
            1,
            vec![WeightMatrix::new(n, linalg::identity(n)).unwrap()],
        )
        .unwrap();
        let r = s.validate(5).unwrap();
        assert!(!r.pass);
        let v = r.violation.unwrap();
        assert_eq!(v.clause, Clause::Connectivity);
        assert_eq!(v.t, 1);
    }

    #[test]
    fn switching_ring_needs_its_full_window() {
        let s = GraphSchedule::switching_ring(20, 4, 0.2).unwrap();
        assert!(s.validate(100).unwrap().pass, "valid at B = 4");
        let narrow = s.with_window(1).unwrap();
        let r = narrow.validate(100).unwrap();
        assert!(!r.pass, "a single arc matrix is not strongly connected");
        assert_eq!(r.violation.unwrap().clause, Clause::Connectivity);
    }

    #[test]
    fn validation_is_monotone_in_window() {
        let s = GraphSchedule::switching_ring(8, 4, 0.2).unwrap();
        for b in 4..=8 {
            assert!(
                s.with_window(b).unwrap().validate(32).unwrap().pass,
                "valid at B=4 must stay valid at B={b}"
            );
        }
    }

    #[test]
    fn horizon_shorter_than_window_is_rejected() {
        let s = GraphSchedule::switching_ring(6, 3, 0.2).unwrap();
        assert!(matches!(s.validate(2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn stochasticity_violation_is_reported_with_time() {
        let good = WeightMatrix::new(2, vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        let bad = WeightMatrix::new(2, vec![0.9, 0.1, 0.5, 0.5]).unwrap(); // column sums 1.4, 0.6
        let s = GraphSchedule::new(2, 0.1, 1, vec![good, bad]).unwrap();
        let r = s.validate(4).unwrap();
        let v = r.violation.unwrap();
        assert_eq!(v.clause, Clause::DoublyStochastic);
        assert_eq!(v.t, 2);
    }

    #[test]
    fn transition_product_identity_at_equal_indices() {
        let s = GraphSchedule::switching_ring(5, 2, 0.25).unwrap();
        assert_eq!(s.transition_product(3, 3).unwrap(), linalg::identity(5));
    }

    #[test]
    fn transition_product_of_uniform_mixing_is_uniform() {
        let s = GraphSchedule::complete(4).unwrap();
        let phi = s.transition_product(7, 2).unwrap();
        for v in &phi {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn transition_product_matches_direct_multiplication() {
        // Independent oracle: multiply in the opposite association order.
        let s = GraphSchedule::random(3, 2, 0.1, 4, 99).unwrap();
        let (k, start) = (9, 2);
        let phi = s.transition_product(k, start).unwrap();
        let mut oracle = linalg::identity(3);
        for l in (start..k).rev() {
            oracle = linalg::matmul(&oracle, s.matrix(l).entries(), 3);
        }
        for (a, b) in phi.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn transition_products_stay_doubly_stochastic() {
        let s = GraphSchedule::switching_ring(7, 3, 0.2).unwrap();
        for k in [1usize, 5, 20, 90] {
            let phi = s.transition_product(k + 1, 1).unwrap();
            let err = GraphSchedule::product_stochasticity_error(&phi, 7);
            assert!(err < 1e-10, "product sum error {err} at k={k}");
        }
    }

    #[test]
    fn transition_product_semigroup_property() {
        let s = GraphSchedule::random(4, 2, 0.15, 6, 5).unwrap();
        let (k, m, start) = (17, 9, 3);
        let whole = s.transition_product(k, start).unwrap();
        let left = s.transition_product(k, m).unwrap();
        let right = s.transition_product(m, start).unwrap();
        let composed = linalg::matmul(&left, &right, 4);
        for (a, b) in whole.iter().zip(&composed) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn lemma1_holds_on_uniform_mixing_with_zero_deviation() {
        let s = GraphSchedule::complete(5).unwrap();
        let r = s.verify_lemma1(40, 3, 0).unwrap();
        assert_eq!(r.violations, 0);
        // After one step every entry is exactly 1/n, so deviations are ~0 and
        // margins are at most -gamma*beta + rounding.
        assert!(r.worst_margin < 0.0, "worst margin {}", r.worst_margin);
    }

    #[test]
    fn lemma1_holds_on_switching_ring() {
        let s = GraphSchedule::switching_ring(6, 3, 0.2).unwrap();
        let r = s.verify_lemma1(150, 5, 1).unwrap();
        assert_eq!(r.violations, 0, "worst {:?} at {:?}", r.worst_margin, r.worst_at);
    }

    #[test]
    fn lemma1_flags_a_broken_schedule() {
        // Row-stochastic but one column drains: mass concentrates and entries
        // cannot approach 1/n. Used as a negative control; validation fails
        // and the verifier reports violations.
        let w = WeightMatrix::new(2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let s = GraphSchedule::new(2, 0.2, 1, vec![w]).unwrap();
        assert!(!s.validate(4).unwrap().pass);
        let r = s.verify_lemma1(60, 2, 0).unwrap();
        assert!(r.violations > 0, "drained column must break the bound");
    }

    #[test]
    fn random_schedules_are_valid() {
        for (i, (n, b, eta)) in [(2usize, 1usize, 0.5f64), (5, 3, 0.2), (8, 4, 0.05), (3, 2, 0.34)]
            .iter()
            .enumerate()
        {
            let s = GraphSchedule::random(*n, *b, *eta, 2 * b, i as u64).unwrap();
            let r = s.validate(4 * *b).unwrap();
            assert!(r.pass, "random schedule n={n} b={b} eta={eta}: {:?}", r.violation);
        }
    }

    #[test]
    fn text_round_trip_preserves_schedule() {
        let s = GraphSchedule::random(4, 2, 0.12, 4, 7).unwrap();
        let parsed = GraphSchedule::from_text(&s.to_text()).unwrap();
        assert_eq!(s, parsed);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "3 1 0.2\n\n0.8 0.1 0.1\n0.1 oops 0.1\n0.1 0.1 0.8\n";
        match GraphSchedule::from_text(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("oops"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ragged_block_is_rejected() {
        let text = "2 1 0.2\n0.5 0.5\n0.5\n";
        assert!(matches!(
            GraphSchedule::from_text(text),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}

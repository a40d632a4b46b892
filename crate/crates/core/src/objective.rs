//! Local least-squares objectives and their exact global minimizer.
//!
//! Agent `i` holds `m_i` feature/label pairs and the ridge-regularized
//! squared loss
//!
//! ```text
//! f_i(w) = (1/m_i) sum_j 0.5 (x_ij' w - y_ij)^2 + (ridge/2) ||w||^2
//! ```
//!
//! Only the sufficient statistics are kept: `S_i = (1/m_i) X_i' X_i`,
//! `c_i = (1/m_i) X_i' y_i`, and the mean squared label, so values and
//! gradients cost `O(d^2)` regardless of the sample count. The global
//! objective is the uniform average `f = (1/n) sum_i f_i`; its minimizer
//! solves the pooled normal equations
//!
//! ```text
//! ((1/n) sum_i (S_i + ridge_i I)) x* = (1/n) sum_i c_i
//! ```
//!
//! which are solved once, verified to small residual, and cached along with
//! `f* = f(x*)`, the per-agent gradient norms at `x*`, and the smoothness
//! constant `L = max_i (sigma_max(S_i) + ridge_i)`.

use crate::error::{Error, Result};
use crate::linalg;
use crate::stream::substream;
use rand::Rng;
use rand_distr::StandardNormal;

/// Relative residual allowed on the pooled normal equations.
const SOLVE_TOL: f64 = 1e-10;
/// Standard deviation of the synthetic label noise.
const LABEL_NOISE: f64 = 0.01;

/// One agent's objective, reduced to sufficient statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    dim: usize,
    /// `(1/m) X'X`, row-major `dim x dim`.
    s: Vec<f64>,
    /// `(1/m) X'y`.
    c: Vec<f64>,
    /// `(1/m) sum y^2`.
    y2: f64,
    ridge: f64,
    smoothness: f64,
}

impl Quadratic {
    /// Reduces raw rows and labels. The data itself is not retained.
    pub fn from_data(rows: &[Vec<f64>], labels: &[f64], ridge: f64) -> Result<Self> {
        if rows.is_empty() || rows.len() != labels.len() {
            return Err(Error::MalformedInput(format!(
                "need matching nonempty rows/labels, got {} rows and {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if !(ridge.is_finite() && ridge >= 0.0) {
            return Err(Error::InvalidArgument(format!("ridge must be >= 0, got {ridge}")));
        }
        let dim = rows[0].len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::MalformedInput("ragged or empty feature rows".into()));
        }
        let finite =
            rows.iter().flatten().all(|v| v.is_finite()) && labels.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::MalformedInput("non-finite feature or label".into()));
        }
        let inv_m = 1.0 / rows.len() as f64;
        let mut s = vec![0.0; dim * dim];
        let mut c = vec![0.0; dim];
        let mut y2 = 0.0;
        for (row, &y) in rows.iter().zip(labels) {
            for a in 0..dim {
                let ra = row[a];
                for b in 0..dim {
                    s[a * dim + b] += ra * row[b] * inv_m;
                }
                c[a] += ra * y * inv_m;
            }
            y2 += y * y * inv_m;
        }
        let smoothness = linalg::top_eigenvalue(&s, dim) + ridge;
        Ok(Self { dim, s, c, y2, ridge, smoothness })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    /// `f_i(w)`.
    pub fn value(&self, w: &[f64]) -> f64 {
        debug_assert_eq!(w.len(), self.dim);
        let sw = linalg::matvec(&self.s, self.dim, self.dim, w);
        0.5 * linalg::dot(w, &sw) - linalg::dot(&self.c, w)
            + 0.5 * self.y2
            + 0.5 * self.ridge * linalg::dot(w, w)
    }

    /// `grad f_i(w) = (S + ridge I) w - c`.
    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        debug_assert_eq!(w.len(), self.dim);
        let mut g = linalg::matvec(&self.s, self.dim, self.dim, w);
        for a in 0..self.dim {
            g[a] += self.ridge * w[a] - self.c[a];
        }
        g
    }

    /// Gradient Lipschitz constant `sigma_max(S) + ridge`.
    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    /// Hessian contribution `S + ridge I`, row-major.
    fn hessian(&self) -> Vec<f64> {
        let mut h = self.s.clone();
        for a in 0..self.dim {
            h[a * self.dim + a] += self.ridge;
        }
        h
    }
}

/// The full collection of agent objectives with cached optimum data.
#[derive(Debug, Clone)]
pub struct Problem {
    agents: Vec<Quadratic>,
    minimizer: Vec<f64>,
    f_star: f64,
    lipschitz: f64,
    grad_norms_at_opt: Vec<f64>,
}

impl Problem {
    pub fn new(agents: Vec<Quadratic>) -> Result<Self> {
        if agents.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 agents, got {}",
                agents.len()
            )));
        }
        let dim = agents[0].dim;
        if agents.iter().any(|a| a.dim != dim) {
            return Err(Error::MalformedInput("agents disagree on dimension".into()));
        }
        let inv_n = 1.0 / agents.len() as f64;
        let mut pooled = vec![0.0; dim * dim];
        let mut rhs = vec![0.0; dim];
        for agent in &agents {
            let h = agent.hessian();
            for (acc, v) in pooled.iter_mut().zip(&h) {
                *acc += inv_n * v;
            }
            for (acc, v) in rhs.iter_mut().zip(&agent.c) {
                *acc += inv_n * v;
            }
        }
        let minimizer = linalg::spd_solve(&pooled, dim, &rhs)?;
        let residual = {
            let ax = linalg::matvec(&pooled, dim, dim, &minimizer);
            let r: Vec<f64> = ax.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            linalg::norm(&r) / linalg::norm(&rhs).max(1.0)
        };
        if residual > SOLVE_TOL {
            return Err(Error::IllPosed(format!(
                "pooled normal equations solved to relative residual {residual:.3e} only"
            )));
        }
        let f_star = agents.iter().map(|a| a.value(&minimizer)).sum::<f64>() * inv_n;
        let lipschitz =
            agents.iter().map(|a| a.smoothness).fold(f64::NEG_INFINITY, f64::max);
        let grad_norms_at_opt = agents
            .iter()
            .map(|a| linalg::norm(&a.gradient(&minimizer)))
            .collect();
        Ok(Self { agents, minimizer, f_star, lipschitz, grad_norms_at_opt })
    }

    /// Synthetic heterogeneous instance. A shared base target `w0` gets an
    /// agent-specific shift of size `heterogeneity`; features are standard
    /// normal and labels carry small observation noise. Larger
    /// `heterogeneity` moves the local minimizers apart, which shows up
    /// directly as larger gradients at the global optimum.
    pub fn generate_synthetic(
        n_agents: usize,
        dim: usize,
        samples_per_agent: usize,
        heterogeneity: f64,
        ridge: f64,
        seed: u64,
    ) -> Result<Self> {
        if n_agents < 2 || dim == 0 || samples_per_agent == 0 {
            return Err(Error::InvalidArgument(format!(
                "need n >= 2, dim >= 1, samples >= 1; got n={n_agents}, dim={dim}, samples={samples_per_agent}"
            )));
        }
        if !(heterogeneity.is_finite() && heterogeneity >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "heterogeneity must be >= 0, got {heterogeneity}"
            )));
        }
        let mut base_rng = substream(seed, 0, 0);
        let w0: Vec<f64> = (0..dim).map(|_| base_rng.sample::<f64, _>(StandardNormal)).collect();
        let agents: Result<Vec<Quadratic>> = (0..n_agents)
            .map(|i| {
                let mut rng = substream(seed, 1 + i as u64, 0);
                let target: Vec<f64> = w0
                    .iter()
                    .map(|w| w + heterogeneity * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let mut rows = Vec::with_capacity(samples_per_agent);
                let mut labels = Vec::with_capacity(samples_per_agent);
                for _ in 0..samples_per_agent {
                    let row: Vec<f64> =
                        (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    let y = linalg::dot(&row, &target)
                        + LABEL_NOISE * rng.sample::<f64, _>(StandardNormal);
                    rows.push(row);
                    labels.push(y);
                }
                Quadratic::from_data(&rows, &labels, ridge)
            })
            .collect();
        Self::new(agents?)
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn dim(&self) -> usize {
        self.agents[0].dim
    }

    pub fn agent(&self, i: usize) -> &Quadratic {
        &self.agents[i]
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    /// `max_i` of the local smoothness constants.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `||grad f_i(x*)||` per agent.
    pub fn grad_norms_at_opt(&self) -> &[f64] {
        &self.grad_norms_at_opt
    }

    /// `Bstar = max_i ||grad f_i(x*)||`.
    pub fn grad_norm_at_opt(&self) -> f64 {
        self.grad_norms_at_opt.iter().fold(0.0, |a, b| a.max(*b))
    }

    /// `f(w) - f*`.
    pub fn gap(&self, w: &[f64]) -> f64 {
        self.global_value(w) - self.f_star
    }

    pub fn global_value(&self, w: &[f64]) -> f64 {
        self.agents.iter().map(|a| a.value(w)).sum::<f64>() / self.agents.len() as f64
    }

    pub fn global_gradient(&self, w: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        for agent in &self.agents {
            for (acc, v) in g.iter_mut().zip(agent.gradient(w)) {
                *acc += v;
            }
        }
        let inv_n = 1.0 / self.agents.len() as f64;
        for v in &mut g {
            *v *= inv_n;
        }
        g
    }
}

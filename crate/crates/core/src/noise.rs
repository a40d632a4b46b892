//! Gradient noise models with a bounded p-th absolute moment.
//!
//! Each model produces an additive, zero-mean noise vector `xi` whose p-th
//! moment is finite for some `p` in (1, 2] even when the variance is not:
//!
//! ```text
//! E ||xi||^p <= sigma^p,   p in (1, 2]
//! ```
//!
//! A per-coordinate Student-t with `dof` degrees of freedom has finite p-th
//! moment only for p < dof, which makes `dof` slightly above 1 a natural
//! stress test. The declared `sigma` uses the closed-form one-dimensional
//! moment
//!
//! ```text
//! E |T_dof|^p = dof^(p/2) * G((p+1)/2) * G((dof-p)/2) / (sqrt(pi) * G(dof/2))
//! ```
//!
//! (`G` the gamma function) and the subadditivity `(sum a_i)^q <= sum a_i^q`
//! for `q <= 1`, giving `sigma^p = dim * scale^p * E|T|^p`. For Gaussian
//! noise, Jensen gives `sigma = sqrt(dim) * scale`. Centered Pareto noise has
//! no closed form wired in; callers supply an explicit `sigma` or estimate
//! one with [`NoiseModel::estimate_p_moment`].

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg;
use crate::stream::substream;
use rand::Rng;
use rand_distr::{ChiSquared, Pareto, StandardNormal};
use statrs::function::gamma::ln_gamma;

/// Additive noise on each gradient evaluation, drawn i.i.d. per coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// Exact gradients.
    None,
    /// `scale * z`, `z` standard normal.
    Gaussian { scale: f64 },
    /// `scale * z / sqrt(w / dof)`, `z` standard normal, `w` chi-squared
    /// with `dof` degrees of freedom. Heavy-tailed: infinite variance for
    /// `dof <= 2`.
    StudentT { dof: f64, scale: f64 },
    /// Pareto(scale, shape) shifted by its mean `shape * scale / (shape - 1)`
    /// so the noise is centered. One-sided and heavy-tailed; `shape > 1`.
    Pareto { scale: f64, shape: f64 },
}

/// Point estimate of `E ||xi||^p` with a bootstrap confidence interval.
#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub point: f64,
    /// 2.5% bootstrap percentile.
    pub lo: f64,
    /// 97.5% bootstrap percentile.
    pub hi: f64,
    pub samples: usize,
}

const BOOTSTRAP_RESAMPLES: usize = 200;

/// Moment orders the analysis supports.
pub fn check_moment_order(p: f64) -> Result<()> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "moment order p must lie in (1, 2], got {p}"
        )));
    }
    Ok(())
}

/// `E |T_dof|^p` for a standard Student-t variable; finite iff `p < dof`.
pub fn student_t_abs_moment(dof: f64, p: f64) -> Result<f64> {
    if !(dof.is_finite() && dof > 0.0) {
        return Err(Error::InvalidArgument(format!("degrees of freedom must be positive, got {dof}")));
    }
    if !(p > 0.0 && p < dof) {
        return Err(Error::InvalidArgument(format!(
            "|T|^p has finite mean only for 0 < p < dof, got p={p}, dof={dof}"
        )));
    }
    let ln_m = 0.5 * p * dof.ln() + ln_gamma(0.5 * (p + 1.0)) + ln_gamma(0.5 * (dof - p))
        - 0.5 * std::f64::consts::PI.ln()
        - ln_gamma(0.5 * dof);
    Ok(ln_m.exp())
}

impl NoiseModel {
    /// Checks the parameters and that the p-th moment is finite.
    pub fn validate(&self, p: f64) -> Result<()> {
        check_moment_order(p)?;
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::Gaussian { scale } => {
                if !(scale.is_finite() && scale >= 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "gaussian scale must be finite and >= 0, got {scale}"
                    )));
                }
                Ok(())
            }
            NoiseModel::StudentT { dof, scale } => {
                if !(scale.is_finite() && scale >= 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "student-t scale must be finite and >= 0, got {scale}"
                    )));
                }
                student_t_abs_moment(dof, p).map(|_| ())
            }
            NoiseModel::Pareto { scale, shape } => {
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "pareto scale must be positive, got {scale}"
                    )));
                }
                if !(shape.is_finite() && shape > p) {
                    return Err(Error::InvalidArgument(format!(
                        "pareto shape must exceed p={p} for a finite p-th moment, got {shape}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Draws one `dim`-dimensional noise vector. Parameters are assumed to
    /// have passed [`validate`](Self::validate).
    pub fn sample(&self, dim: usize, rng: &mut impl Rng) -> Vec<f64> {
        match *self {
            NoiseModel::None => vec![0.0; dim],
            NoiseModel::Gaussian { scale } => (0..dim)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            NoiseModel::StudentT { dof, scale } => {
                let chi = ChiSquared::new(dof).expect("validated dof");
                (0..dim)
                    .map(|_| {
                        let z: f64 = rng.sample(StandardNormal);
                        let w: f64 = rng.sample(chi);
                        scale * z / (w.max(f64::MIN_POSITIVE) / dof).sqrt()
                    })
                    .collect()
            }
            NoiseModel::Pareto { scale, shape } => {
                let d = Pareto::new(scale, shape).expect("validated parameters");
                let mean = shape * scale / (shape - 1.0);
                (0..dim).map(|_| rng.sample::<f64, _>(d) - mean).collect()
            }
        }
    }

    /// `sigma` such that `E ||xi||^p <= sigma^p`, from the closed-form
    /// per-coordinate moments. `None` when no closed form is wired in
    /// (Pareto) — supply or estimate `sigma` explicitly then.
    pub fn declared_sigma(&self, dim: usize, p: f64) -> Option<f64> {
        match *self {
            NoiseModel::None => Some(0.0),
            NoiseModel::Gaussian { scale } => Some((dim as f64).sqrt() * scale),
            NoiseModel::StudentT { dof, scale } => student_t_abs_moment(dof, p)
                .ok()
                .map(|m| (dim as f64 * m).powf(1.0 / p) * scale),
            NoiseModel::Pareto { .. } => None,
        }
    }

    /// Monte Carlo estimate of `E ||xi||^p` with a 95% percentile-bootstrap
    /// interval. Sample `k` is drawn from substream `(seed, k, 0)` and the
    /// bootstrap from lane `u64::MAX`, so the result is independent of the
    /// thread count.
    pub fn estimate_p_moment(
        &self,
        dim: usize,
        p: f64,
        samples: usize,
        seed: u64,
    ) -> Result<MomentEstimate> {
        self.validate(p)?;
        if dim == 0 || samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "moment estimation needs dim >= 1 and samples >= 2, got dim={dim}, samples={samples}"
            )));
        }
        let norms_p = exec::map_indexed(samples, |k| {
            let mut rng = substream(seed, k as u64, 0);
            linalg::norm(&self.sample(dim, &mut rng)).powf(p)
        });
        let point = norms_p.iter().sum::<f64>() / samples as f64;
        let mut means = exec::map_indexed(BOOTSTRAP_RESAMPLES, |r| {
            let mut rng = substream(seed, u64::MAX, r as u64);
            let mut acc = 0.0;
            for _ in 0..samples {
                acc += norms_p[rng.random_range(0..samples)];
            }
            acc / samples as f64
        });
        means.sort_by(|a, b| a.total_cmp(b));
        Ok(MomentEstimate {
            point,
            lo: percentile(&means, 0.025),
            hi: percentile(&means, 0.975),
            samples,
        })
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx]
}

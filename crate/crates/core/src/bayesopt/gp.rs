//! GP regression with a squared-exponential ARD kernel and constant prior
//! mean (the mean of the observed losses).
//!
//! Noise, jitter and the signal-variance grid are all expressed relative to
//! the sample variance of the losses, which is the same as fitting
//! standardized losses. CV losses vary on a scale of 1e-3 or less, where an
//! absolute noise of 1e-6 would already smooth away visible structure.

use serde::{Deserialize, Serialize};

use super::{LogPoint, Observation};
use crate::error::{Error, Result};

/// Observation noise variance, relative to the loss variance.
pub const NOISE_FLOOR: f64 = 1e-6;
/// Extra diagonal tried in turn when factorization fails, relative to the
/// loss variance.
const JITTER_LADDER: [f64; 5] = [0.0, 1e-10, 1e-8, 1e-6, 1e-4];
/// Length scales as fractions of the spread of the observed points.
const LENGTH_FACTORS: [f64; 5] = [0.05, 0.1, 0.2, 0.4, 0.8];
/// Signal variances as multiples of the observed loss variance.
const SIGNAL_FACTORS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
/// Smallest spread of the observed points used to anchor the length grid.
const MIN_SPREAD: f64 = 1.0;

/// Sample variance of the losses; 1 when they are (numerically) constant.
pub fn loss_scale(obs: &[Observation]) -> f64 {
    let n = obs.len() as f64;
    let mean = obs.iter().map(|o| o.loss).sum::<f64>() / n;
    let var = obs.iter().map(|o| (o.loss - mean).powi(2)).sum::<f64>() / n;
    if var > 1e-12 { var } else { 1.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpParams {
    pub length_scales: [f64; 2],
    pub signal_var: f64,
    pub noise_var: f64,
}

impl GpParams {
    pub fn kernel(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        let r2: f64 = (0..2).map(|d| ((a[d] - b[d]) / self.length_scales[d]).powi(2)).sum();
        self.signal_var * (-0.5 * r2).exp()
    }
}

/// A fitted GP: hyperparameters, training points and the Cholesky factor
/// of `K + (noise + jitter) I`.
#[derive(Debug, Clone, PartialEq)]
pub struct GpPosterior {
    pub params: GpParams,
    pub prior_mean: f64,
    /// Extra diagonal added on top of the noise to make the factorization
    /// succeed, in absolute units.
    pub jitter: f64,
    pub log_marginal_likelihood: f64,
    points: Vec<[f64; 2]>,
    chol: Vec<f64>,
    weights: Vec<f64>,
}

impl GpPosterior {
    pub fn n_observations(&self) -> usize {
        self.points.len()
    }

    /// Posterior mean and variance of the latent loss at `point`; the
    /// variance is clamped at 0.
    pub fn posterior(&self, point: &LogPoint) -> (f64, f64) {
        let p = point.coords();
        let kstar: Vec<f64> = self.points.iter().map(|q| self.params.kernel(&p, q)).collect();
        let mean = self.prior_mean + kstar.iter().zip(&self.weights).map(|(k, w)| k * w).sum::<f64>();
        let v = forward_sub(&self.chol, self.points.len(), &kstar);
        let var = self.params.signal_var - v.iter().map(|x| x * x).sum::<f64>();
        (mean, var.max(0.0))
    }
}

/// Lower Cholesky factor of the row-major `n x n` matrix, or `None` when it
/// is not numerically positive definite.
fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = a[i * n + i] - s;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (a[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn forward_sub(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * x[k]).sum();
        x[i] = (b[i] - s) / l[i * n + i];
    }
    x
}

fn backward_sub_transposed(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (b[i] - s) / l[i * n + i];
    }
    x
}

fn check_observations(obs: &[Observation]) -> Result<()> {
    if obs.len() < 2 {
        return Err(Error::invalid(format!("GP fit needs at least 2 observations, got {}", obs.len())));
    }
    if obs.iter().any(|o| !o.loss.is_finite() || !o.point.log10_c.is_finite() || !o.point.log10_gamma.is_finite()) {
        return Err(Error::invalid("GP observations must be finite"));
    }
    Ok(())
}

/// Fits with fixed hyperparameters (absolute units), walking the jitter
/// ladder until the covariance factorizes.
pub fn gp_fit_with(obs: &[Observation], params: GpParams) -> Result<GpPosterior> {
    check_observations(obs)?;
    let n = obs.len();
    let scale = loss_scale(obs);
    let points: Vec<[f64; 2]> = obs.iter().map(|o| o.point.coords()).collect();
    let prior_mean = obs.iter().map(|o| o.loss).sum::<f64>() / n as f64;
    let centered: Vec<f64> = obs.iter().map(|o| o.loss - prior_mean).collect();
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cov[i * n + j] = params.kernel(&points[i], &points[j]);
        }
    }
    for jitter in JITTER_LADDER.map(|j| j * scale) {
        let mut a = cov.clone();
        for i in 0..n {
            a[i * n + i] += params.noise_var + jitter;
        }
        if let Some(chol) = cholesky(&a, n) {
            let weights = backward_sub_transposed(&chol, n, &forward_sub(&chol, n, &centered));
            let fit: f64 = centered.iter().zip(&weights).map(|(y, w)| y * w).sum();
            let log_det: f64 = (0..n).map(|i| chol[i * n + i].ln()).sum();
            let lml = -0.5 * fit - log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
            return Ok(GpPosterior {
                params,
                prior_mean,
                jitter,
                log_marginal_likelihood: lml,
                points,
                chol,
                weights,
            });
        }
    }
    Err(Error::Numeric(format!(
        "GP covariance is not positive definite even with jitter {:e}",
        JITTER_LADDER[JITTER_LADDER.len() - 1] * scale
    )))
}

/// Fits by maximizing the log marginal likelihood over a 5x5x5 grid of
/// (length scale per dimension, signal variance); noise is held at
/// [`NOISE_FLOOR`] times the loss variance. The first grid point wins ties.
pub fn gp_fit(obs: &[Observation]) -> Result<GpPosterior> {
    check_observations(obs)?;
    let variance = loss_scale(obs);
    let spread = |d: usize| {
        let vals = obs.iter().map(|o| o.point.coords()[d]);
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        (hi - lo).max(MIN_SPREAD)
    };
    let (s0, s1) = (spread(0), spread(1));

    let mut best: Option<GpPosterior> = None;
    let mut last_err = None;
    for &f0 in &LENGTH_FACTORS {
        for &f1 in &LENGTH_FACTORS {
            for &fs in &SIGNAL_FACTORS {
                let params = GpParams {
                    length_scales: [f0 * s0, f1 * s1],
                    signal_var: fs * variance,
                    noise_var: NOISE_FLOOR * variance,
                };
                match gp_fit_with(obs, params) {
                    Ok(gp) => {
                        if best.as_ref().is_none_or(|b| gp.log_marginal_likelihood > b.log_marginal_likelihood) {
                            best = Some(gp);
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Numeric("GP fit failed".into())))
}

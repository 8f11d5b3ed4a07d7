use statrs::function::erf::erfc;

use super::{GpPosterior, LogPoint};

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Expected improvement below `best` of a Gaussian with mean `mean` and
/// standard deviation `sd`.
pub fn expected_improvement_at(mean: f64, sd: f64, best: f64) -> f64 {
    let gain = best - mean;
    if sd < 1e-12 {
        return gain.max(0.0);
    }
    let z = gain / sd;
    (gain * normal_cdf(z) + sd * normal_pdf(z)).max(0.0)
}

pub fn expected_improvement(gp: &GpPosterior, point: &LogPoint, best_loss: f64) -> f64 {
    let (mean, var) = gp.posterior(point);
    expected_improvement_at(mean, var.sqrt(), best_loss)
}

//! Gaussian-process Bayesian optimization of SVM hyperparameters in
//! `(log10 C, log10 gamma)` coordinates.
//!
//! Proposals maximize expected improvement over a seeded candidate pool.
//! The reported point is the visited point with the lowest upper confidence
//! bound `mu + 2 sigma` of the cross-validation loss under the final GP.

mod acquisition;
mod gp;
mod tune;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svm::SvmHyperparams;

pub use acquisition::{expected_improvement, expected_improvement_at, normal_cdf, normal_pdf};
pub use gp::{gp_fit, gp_fit_with, loss_scale, GpParams, GpPosterior, NOISE_FLOOR};
pub use tune::{tune, tune_with, TuneConfig, TuneResult, DEFAULT_BUDGET, N_CANDIDATES, N_INITIAL, UCB_KAPPA};

/// A point in log10 hyperparameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPoint {
    pub log10_c: f64,
    pub log10_gamma: f64,
}

impl LogPoint {
    pub fn new(log10_c: f64, log10_gamma: f64) -> Self {
        Self { log10_c, log10_gamma }
    }

    pub(crate) fn coords(&self) -> [f64; 2] {
        [self.log10_c, self.log10_gamma]
    }

    pub fn hyperparams(&self) -> SvmHyperparams {
        SvmHyperparams { c: 10f64.powf(self.log10_c), gamma: 10f64.powf(self.log10_gamma) }
    }
}

/// Box bounds in log10 coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub log10_c: (f64, f64),
    pub log10_gamma: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self { log10_c: (-3.0, 3.0), log10_gamma: (-5.0, 1.0) }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("log10_C", self.log10_c), ("log10_gamma", self.log10_gamma)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid(format!("{name} bounds must satisfy lower < upper, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub(crate) fn bounds(&self) -> [(f64, f64); 2] {
        [self.log10_c, self.log10_gamma]
    }

    pub fn contains(&self, p: &LogPoint) -> bool {
        self.bounds().iter().zip(p.coords()).all(|(&(lo, hi), v)| v >= lo && v <= hi)
    }
}

/// One evaluated point and its loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub point: LogPoint,
    pub loss: f64,
}

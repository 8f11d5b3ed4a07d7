//! Binary soft-margin SVM with an RBF kernel.
//!
//! Labels inside the solver are `-1`/`+1` ([`Sign`]); a [`LabelMap`] ties
//! them back to dataset class ids. `sign(0)` predicts `+1`.

mod cv;
mod io;
mod kernel;
mod smo;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurestore::{apply_standardizer, fit_standardizer, FeatureMatrix, LabelVector, StandardizationParams};

pub use cv::{cv_loss, stratified_folds, CvProblem, CvSpec, DEFAULT_FOLDS};
pub use io::{decode_svm, encode_svm, read_svm, write_svm, SVM_MAGIC};
pub use kernel::{rbf_kernel, FULL_GRAM_LIMIT};

pub type Sign = i8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmHyperparams {
    /// Box constraint.
    pub c: f64,
    /// RBF width.
    pub gamma: f64,
}

impl SvmHyperparams {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        let p = Self { c, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0 && self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid(format!(
                "C and gamma must be positive and finite, got C={} gamma={}",
                self.c, self.gamma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoConfig {
    pub tol: f64,
    /// Iteration budget in sweeps of `n` pair updates; `None` means `10 * n`.
    pub max_passes: Option<usize>,
}

impl Default for SmoConfig {
    fn default() -> Self {
        Self { tol: 1e-3, max_passes: None }
    }
}

impl SmoConfig {
    fn max_iter(&self, n: usize) -> usize {
        self.max_passes.unwrap_or(10 * n).saturating_mul(n).max(1)
    }
}

/// Which dataset class each side of the hyperplane stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub negative: u32,
    pub positive: u32,
}

impl LabelMap {
    pub fn class_of(&self, s: Sign) -> u32 {
        if s > 0 { self.positive } else { self.negative }
    }

    pub fn sign_of(&self, class: u32) -> Option<Sign> {
        if class == self.positive {
            Some(1)
        } else if class == self.negative {
            Some(-1)
        } else {
            None
        }
    }

    /// Maps class ids to signs, rejecting ids outside the map.
    pub fn signs(&self, classes: &[u32]) -> Result<Vec<Sign>> {
        classes
            .iter()
            .map(|&c| self.sign_of(c).ok_or_else(|| Error::invalid(format!("class {c} is not part of this binary task"))))
            .collect()
    }
}

impl Default for LabelMap {
    fn default() -> Self {
        Self { negative: 0, positive: 1 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrainStats {
    pub iterations: usize,
    pub kkt_residual: f64,
    pub dual_objective: f64,
}

/// A trained classifier: support vectors, `alpha_i * y_i`, and bias.
///
/// When `standardizer` is set, inputs are standardized (and rounded to
/// `f32`, as during training) before the kernel is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub support_rows: FeatureMatrix,
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub hyperparams: SvmHyperparams,
    pub standardizer: Option<StandardizationParams>,
    pub label_map: LabelMap,
    pub stats: TrainStats,
}

impl SvmModel {
    pub fn n_features(&self) -> usize {
        self.support_rows.n_cols()
    }

    pub fn n_support(&self) -> usize {
        self.dual_coefs.len()
    }

    /// `f(x) = sum_i alpha_i y_i k(s_i, x) + b` for every row of `x`.
    pub fn decision_values(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        if x.n_cols() != self.n_features() {
            return Err(Error::invalid(format!(
                "model expects {} features, input has {}",
                self.n_features(),
                x.n_cols()
            )));
        }
        let standardized;
        let x = match &self.standardizer {
            Some(p) => {
                standardized = apply_standardizer(p, x)?;
                &standardized
            }
            None => x,
        };
        let gamma = self.hyperparams.gamma;
        Ok(x.rows()
            .map(|row| {
                self.support_rows
                    .rows()
                    .zip(&self.dual_coefs)
                    .map(|(s, &coef)| coef * (-gamma * kernel::squared_distance(s, row)).exp())
                    .sum::<f64>()
                    + self.bias
            })
            .collect())
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<Sign>> {
        Ok(self.decision_values(x)?.into_iter().map(|f| if f >= 0.0 { 1 } else { -1 }).collect())
    }

    pub fn predict_classes(&self, x: &FeatureMatrix) -> Result<Vec<u32>> {
        Ok(self.predict(x)?.into_iter().map(|s| self.label_map.class_of(s)).collect())
    }
}

pub(crate) fn check_signs(y: &[Sign], n_rows: usize) -> Result<Vec<f64>> {
    if y.len() != n_rows {
        return Err(Error::invalid(format!("{} labels for {} rows", y.len(), n_rows)));
    }
    if let Some(v) = y.iter().find(|&&v| v != 1 && v != -1) {
        return Err(Error::invalid(format!("SVM labels must be -1 or +1, got {v}")));
    }
    if !(y.contains(&1) && y.contains(&-1)) {
        return Err(Error::invalid("SVM training needs both classes present"));
    }
    Ok(y.iter().map(|&v| f64::from(v)).collect())
}

/// Trains on `x` as given (no standardization).
pub fn smo_train(x: &FeatureMatrix, y: &[Sign], params: SvmHyperparams, config: SmoConfig) -> Result<SvmModel> {
    params.validate()?;
    if x.n_rows() < 2 {
        return Err(Error::invalid("SVM training needs at least 2 rows"));
    }
    let yf = check_signs(y, x.n_rows())?;
    let mut k = kernel::KernelMatrix::from_data(x, params.gamma);
    let sol = smo::solve(&mut k, &yf, params.c, config.tol, config.max_iter(x.n_rows()));
    let model = model_from_solution(x, &yf, &sol, params)?;
    if !sol.converged {
        return Err(Error::NotConverged { best: Box::new(model), residual: sol.residual, iterations: sol.iterations });
    }
    Ok(model)
}

fn model_from_solution(x: &FeatureMatrix, y: &[f64], sol: &smo::SmoSolution, params: SvmHyperparams) -> Result<SvmModel> {
    let support: Vec<usize> = (0..sol.alpha.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    Ok(SvmModel {
        support_rows: x.select_rows(&support)?.with_origin(None),
        dual_coefs: support.iter().map(|&i| sol.alpha[i] * y[i]).collect(),
        bias: sol.bias,
        hyperparams: params,
        standardizer: None,
        label_map: LabelMap::default(),
        stats: TrainStats {
            iterations: sol.iterations,
            kkt_residual: sol.residual,
            dual_objective: sol.dual_objective,
        },
    })
}

/// Fits a standardizer on `rows` of `x`, then trains on those rows.
/// Classes in `labels` are mapped to signs through `label_map`.
pub fn train_standardized(
    x: &FeatureMatrix,
    labels: &LabelVector,
    rows: &[usize],
    label_map: LabelMap,
    params: SvmHyperparams,
    config: SmoConfig,
) -> Result<SvmModel> {
    labels.check_rows(x)?;
    let std = fit_standardizer(x, rows)?;
    let train = apply_standardizer(&std, &x.select_rows(rows)?)?;
    let y = label_map.signs(labels.select_rows(rows).labels())?;
    let attach = |mut m: SvmModel| {
        m.standardizer = Some(std.clone());
        m.label_map = label_map;
        m
    };
    match smo_train(&train, &y, params, config) {
        Ok(m) => Ok(attach(m)),
        Err(Error::NotConverged { best, residual, iterations }) => {
            Err(Error::NotConverged { best: Box::new(attach(*best)), residual, iterations })
        }
        Err(e) => Err(e),
    }
}

use rayon::prelude::*;

use super::kernel::{self, KernelMatrix, FULL_GRAM_LIMIT};
use super::{check_signs, model_from_solution, smo, Sign, SmoConfig, SvmHyperparams};
use crate::error::{Error, Result};
use crate::featurestore::{apply_standardizer, fit_standardizer, FeatureMatrix};
use crate::rng;

pub const DEFAULT_FOLDS: usize = 10;

/// Distance matrices for all folds are kept between evaluations while they
/// fit in this budget.
const DISTANCE_CACHE_BYTES: usize = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CvSpec {
    pub folds: usize,
    pub seed: u64,
}

impl Default for CvSpec {
    fn default() -> Self {
        Self { folds: DEFAULT_FOLDS, seed: 0 }
    }
}

/// Fold id of every row. Each class (−1 first) is shuffled with one shared
/// seeded stream and dealt round-robin; the dealing position carries over
/// from one class to the next so fold sizes differ by at most one.
pub fn stratified_folds(y: &[Sign], folds: usize, seed: u64) -> Result<Vec<usize>> {
    let neg: Vec<usize> = (0..y.len()).filter(|&i| y[i] < 0).collect();
    let pos: Vec<usize> = (0..y.len()).filter(|&i| y[i] > 0).collect();
    let smallest = neg.len().min(pos.len());
    if folds < 2 || folds > smallest {
        return Err(Error::invalid(format!(
            "{folds} folds requested; need 2..={smallest} (smallest class count)"
        )));
    }
    let mut rng = rng::seeded(seed);
    let mut assignment = vec![0usize; y.len()];
    let mut next = 0usize;
    for mut class in [neg, pos] {
        rng::shuffle(&mut class, &mut rng);
        for i in class {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

struct Fold {
    train: FeatureMatrix,
    train_y: Vec<f64>,
    test: FeatureMatrix,
    test_y: Vec<f64>,
    train_sq: Option<Vec<f64>>,
    cross_sq: Option<Vec<f64>>,
}

/// Stratified k-fold problem prepared once and evaluated for many
/// hyperparameter settings. Each fold refits standardization on its own
/// training part.
pub struct CvProblem {
    folds: Vec<Fold>,
    config: SmoConfig,
}

impl CvProblem {
    pub fn new(x: &FeatureMatrix, y: &[Sign], spec: CvSpec) -> Result<Self> {
        check_signs(y, x.n_rows())?;
        let assignment = stratified_folds(y, spec.folds, spec.seed)?;
        let n = x.n_rows();
        let train_rows_max = n - n / spec.folds;
        let cache_bytes = spec.folds * 8 * (train_rows_max * train_rows_max + n * train_rows_max);
        let cache = train_rows_max <= FULL_GRAM_LIMIT && cache_bytes <= DISTANCE_CACHE_BYTES;
        let folds = (0..spec.folds)
            .into_par_iter()
            .map(|f| -> Result<Fold> {
                let train_idx: Vec<usize> = (0..n).filter(|&i| assignment[i] != f).collect();
                let test_idx: Vec<usize> = (0..n).filter(|&i| assignment[i] == f).collect();
                let std = fit_standardizer(x, &train_idx)?;
                let train = apply_standardizer(&std, &x.select_rows(&train_idx)?)?;
                let test = apply_standardizer(&std, &x.select_rows(&test_idx)?)?;
                let (train_sq, cross_sq) = if cache {
                    (Some(kernel::pairwise_squared_distances(&train)), Some(kernel::cross_squared_distances(&test, &train)))
                } else {
                    (None, None)
                };
                Ok(Fold {
                    train_y: train_idx.iter().map(|&i| f64::from(y[i])).collect(),
                    test_y: test_idx.iter().map(|&i| f64::from(y[i])).collect(),
                    train,
                    test,
                    train_sq,
                    cross_sq,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { folds, config: SmoConfig::default() })
    }

    pub fn with_config(mut self, config: SmoConfig) -> Self {
        self.config = config;
        self
    }

    pub fn n_folds(&self) -> usize {
        self.folds.len()
    }

    /// Mean 0-1 loss over folds (reduced in fold order).
    pub fn loss(&self, params: SvmHyperparams) -> Result<f64> {
        params.validate()?;
        let per_fold = self
            .folds
            .par_iter()
            .map(|fold| self.fold_error(fold, params))
            .collect::<Result<Vec<f64>>>()?;
        Ok(per_fold.iter().sum::<f64>() / per_fold.len() as f64)
    }

    fn fold_error(&self, fold: &Fold, params: SvmHyperparams) -> Result<f64> {
        let n = fold.train.n_rows();
        let mut k = match &fold.train_sq {
            Some(sq) => KernelMatrix::from_squared_distances(sq, n, params.gamma),
            None => KernelMatrix::from_data(&fold.train, params.gamma),
        };
        let sol = smo::solve(&mut k, &fold.train_y, params.c, self.config.tol, self.config.max_iter(n));
        if !sol.converged {
            let best = model_from_solution(&fold.train, &fold.train_y, &sol, params)?;
            return Err(Error::NotConverged { best: Box::new(best), residual: sol.residual, iterations: sol.iterations });
        }
        let support: Vec<usize> = (0..n).filter(|&j| sol.alpha[j] > 0.0).collect();
        let mut errors = 0usize;
        for (r, &yr) in fold.test_y.iter().enumerate() {
            let f: f64 = support
                .iter()
                .map(|&j| {
                    let d = match &fold.cross_sq {
                        Some(sq) => sq[r * n + j],
                        None => kernel::squared_distance(fold.test.row(r), fold.train.row(j)),
                    };
                    sol.alpha[j] * fold.train_y[j] * (-params.gamma * d).exp()
                })
                .sum::<f64>()
                + sol.bias;
            let pred = if f >= 0.0 { 1.0 } else { -1.0 };
            if pred != yr {
                errors += 1;
            }
        }
        Ok(errors as f64 / fold.test_y.len() as f64)
    }
}

/// Stratified k-fold 0-1 loss of an RBF SVM with standardization refit
/// inside every fold.
pub fn cv_loss(x: &FeatureMatrix, y: &[Sign], params: SvmHyperparams, spec: CvSpec) -> Result<f64> {
    CvProblem::new(x, y, spec)?.loss(params)
}

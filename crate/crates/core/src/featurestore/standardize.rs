use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Per-feature mean and population standard deviation fitted on training rows.
///
/// A feature that is constant on the training rows gets `std = 0` and is
/// mapped to 0 by [`apply_standardizer`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardizationParams {
    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    /// Standardizes a single row into `out`.
    pub fn transform_row(&self, row: &[f32], out: &mut [f64]) {
        for (((o, &x), &m), &s) in out.iter_mut().zip(row).zip(&self.mean).zip(&self.std) {
            *o = if s > 0.0 { (f64::from(x) - m) / s } else { 0.0 };
        }
    }
}

pub fn fit_standardizer(matrix: &FeatureMatrix, train_idx: &[usize]) -> Result<StandardizationParams> {
    if train_idx.is_empty() {
        return Err(Error::invalid("cannot fit a standardizer on zero training rows"));
    }
    if let Some(&i) = train_idx.iter().find(|&&i| i >= matrix.n_rows()) {
        return Err(Error::invalid(format!("training row {i} out of range")));
    }
    let d = matrix.n_cols();
    let n = train_idx.len() as f64;
    let mut mean = vec![0.0f64; d];
    let mut lo = vec![f32::INFINITY; d];
    let mut hi = vec![f32::NEG_INFINITY; d];
    for &i in train_idx {
        for (f, &x) in matrix.row(i).iter().enumerate() {
            mean[f] += f64::from(x);
            lo[f] = lo[f].min(x);
            hi[f] = hi[f].max(x);
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0f64; d];
    for &i in train_idx {
        for (f, &x) in matrix.row(i).iter().enumerate() {
            let dx = f64::from(x) - mean[f];
            var[f] += dx * dx;
        }
    }
    let std = var
        .iter()
        .enumerate()
        .map(|(f, v)| if lo[f] == hi[f] { 0.0 } else { (v / n).sqrt() })
        .collect();
    Ok(StandardizationParams { mean, std })
}

pub fn apply_standardizer(params: &StandardizationParams, matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
    if params.n_features() != matrix.n_cols() {
        return Err(Error::invalid(format!(
            "standardizer fitted on {} features, matrix has {}",
            params.n_features(),
            matrix.n_cols()
        )));
    }
    let mut buf = vec![0.0f64; matrix.n_cols()];
    let mut values = Vec::with_capacity(matrix.values().len());
    for row in matrix.rows() {
        params.transform_row(row, &mut buf);
        values.extend(buf.iter().map(|&z| z as f32));
    }
    Ok(FeatureMatrix::from_parts_unchecked(matrix.n_rows(), matrix.n_cols(), values).with_origin(matrix.origin.clone()))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn two_point_column() {
        let m = FeatureMatrix::from_rows(&[[1.0f32, 7.0], [3.0, 7.0]]).unwrap();
        let p = fit_standardizer(&m, &[0, 1]).unwrap();
        assert_eq!(p.mean, vec![2.0, 7.0]);
        assert_eq!(p.std, vec![1.0, 0.0]);
        let z = apply_standardizer(&p, &m).unwrap();
        assert_eq!(z.values(), &[-1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let m = FeatureMatrix::from_rows(&[[0.1f32], [0.1], [0.1]]).unwrap();
        let p = fit_standardizer(&m, &[0, 1, 2]).unwrap();
        assert_eq!(p.std[0], 0.0);
        assert!(apply_standardizer(&p, &m).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn uses_training_rows_only() {
        let m = FeatureMatrix::from_rows(&[[1.0f32], [3.0], [1000.0]]).unwrap();
        let p = fit_standardizer(&m, &[0, 1]).unwrap();
        assert_eq!((p.mean[0], p.std[0]), (2.0, 1.0));
        assert!(fit_standardizer(&m, &[]).is_err());
        assert!(fit_standardizer(&m, &[3]).is_err());
    }

    proptest! {
        #[test]
        fn training_block_is_centered_and_scaled(
            rows in prop::collection::vec(prop::collection::vec(-1.0e3f32..1.0e3, 4), 3..40)
        ) {
            let m = FeatureMatrix::from_rows(&rows).unwrap();
            let idx: Vec<usize> = (0..m.n_rows()).collect();
            let p = fit_standardizer(&m, &idx).unwrap();
            prop_assert!(p.std.iter().all(|&s| s >= 0.0));
            let z = apply_standardizer(&p, &m).unwrap();
            let n = m.n_rows() as f64;
            for f in 0..m.n_cols() {
                let col: Vec<f64> = (0..m.n_rows()).map(|r| f64::from(z.get(r, f))).collect();
                let mean = col.iter().sum::<f64>() / n;
                let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
                if p.std[f] == 0.0 {
                    prop_assert!(col.iter().all(|&v| v == 0.0));
                } else {
                    prop_assert!(mean.abs() <= 1e-6, "mean {}", mean);
                    prop_assert!((sd - 1.0).abs() <= 1e-6, "sd {}", sd);
                    // inverse map
                    for (r, &z) in col.iter().enumerate() {
                        let x = f64::from(m.get(r, f));
                        let back = p.mean[f] + p.std[f] * z;
                        prop_assert!((back - x).abs() <= 1e-6 * x.abs().max(p.std[f]));
                    }
                }
            }
        }
    }
}

//! Labeled feature matrices: storage types, FMX and label-file I/O, class
//! balancing, hold-out splitting and standardization.

mod balance;
mod fmx;
mod io;
mod split;
mod standardize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use balance::balance_downsample;
pub use fmx::{decode_fmx, encode_fmx, read_fmx, write_fmx, FMX_HEADER_LEN, FMX_MAGIC};
pub use io::{read_indices, read_labels, read_manifest, write_atomic, write_indices, write_labels, Manifest};
pub use split::{apportion, split_holdout, SplitFractions, SplitPlan};
pub use standardize::{apply_standardizer, fit_standardizer, StandardizationParams};

/// Where the columns of a matrix came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOrigin {
    pub backbone: String,
    pub layer: String,
}

/// Dense row-major `n_rows x n_cols` matrix of `f32` activations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f32>,
    pub origin: Option<FeatureOrigin>,
}

impl FeatureMatrix {
    /// Builds a matrix, checking the shape and that every value is finite.
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f32>) -> Result<Self> {
        let expected = n_rows
            .checked_mul(n_cols)
            .ok_or_else(|| Error::invalid("matrix shape overflows"))?;
        if values.len() != expected {
            return Err(Error::invalid(format!(
                "matrix of {n_rows}x{n_cols} needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at element {i}")));
        }
        Ok(Self { n_rows, n_cols, values, origin: None })
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::invalid(format!("row {i} has {} columns, expected {n_cols}", r.len())));
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), n_cols, values)
    }

    pub fn with_origin(mut self, origin: Option<FeatureOrigin>) -> Self {
        self.origin = origin;
        self
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.values[row * self.n_cols + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        // chunks_exact panics on 0, and a 0-column matrix still has rows
        (0..self.n_rows).map(move |i| self.row(i))
    }

    /// Copies the given rows, in the given order, into a new matrix.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            if i >= self.n_rows {
                return Err(Error::invalid(format!("row index {i} out of range for {} rows", self.n_rows)));
            }
            values.extend_from_slice(self.row(i));
        }
        Ok(Self { n_rows: idx.len(), n_cols: self.n_cols, values, origin: self.origin.clone() })
    }

    /// Copies the given columns, in the given order, into a new matrix.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&c) = cols.iter().find(|&&c| c >= self.n_cols) {
            return Err(Error::invalid(format!("column index {c} out of range for {} columns", self.n_cols)));
        }
        let mut values = Vec::with_capacity(self.n_rows * cols.len());
        for r in self.rows() {
            values.extend(cols.iter().map(|&c| r[c]));
        }
        Ok(Self { n_rows: self.n_rows, n_cols: cols.len(), values, origin: self.origin.clone() })
    }

    pub(crate) fn from_parts_unchecked(n_rows: usize, n_cols: usize, values: Vec<f32>) -> Self {
        debug_assert_eq!(values.len(), n_rows * n_cols);
        Self { n_rows, n_cols, values, origin: None }
    }
}

/// Per-row class ids plus the id-to-name table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVector {
    labels: Vec<u32>,
    class_names: BTreeMap<u32, String>,
}

impl LabelVector {
    pub fn new(labels: Vec<u32>, class_names: BTreeMap<u32, String>) -> Result<Self> {
        if let Some(l) = labels.iter().find(|l| !class_names.contains_key(l)) {
            return Err(Error::invalid(format!("label {l} has no class name")));
        }
        Ok(Self { labels, class_names })
    }

    /// Labels with generated names (`class_0`, `class_1`, ...) for every id seen.
    pub fn from_ids(labels: Vec<u32>) -> Self {
        let class_names = labels.iter().map(|&l| (l, format!("class_{l}"))).collect();
        Self { labels, class_names }
    }

    /// Default chest X-ray taxonomy: 0 = normal, 1 = bacterial, 2 = viral.
    pub fn default_taxonomy() -> BTreeMap<u32, String> {
        [(0, "normal"), (1, "bacterial"), (2, "viral")]
            .into_iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_names(&self) -> &BTreeMap<u32, String> {
        &self.class_names
    }

    pub fn class_name(&self, id: u32) -> Option<&str> {
        self.class_names.get(&id).map(String::as_str)
    }

    /// Id of the class with the given name (case-insensitive).
    pub fn class_id(&self, name: &str) -> Option<u32> {
        self.class_names
            .iter()
            .find(|(_, n)| n.eq_ignore_ascii_case(name))
            .map(|(&id, _)| id)
    }

    /// Row indices per class id, each list ascending. Only classes that
    /// actually occur are present.
    pub fn members(&self) -> BTreeMap<u32, Vec<usize>> {
        self.members_of(0..self.labels.len())
    }

    pub(crate) fn members_of(&self, rows: impl IntoIterator<Item = usize>) -> BTreeMap<u32, Vec<usize>> {
        let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for i in rows {
            out.entry(self.labels[i]).or_default().push(i);
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn check_rows(&self, matrix: &FeatureMatrix) -> Result<()> {
        if self.labels.len() != matrix.n_rows() {
            return Err(Error::invalid(format!(
                "{} labels for a matrix of {} rows",
                self.labels.len(),
                matrix.n_rows()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shape_and_nan() {
        assert!(FeatureMatrix::new(2, 2, vec![0.0; 3]).is_err());
        assert!(FeatureMatrix::new(1, 2, vec![0.0, f32::NAN]).is_err());
        assert!(FeatureMatrix::new(1, 2, vec![0.0, f32::INFINITY]).is_err());
    }

    #[test]
    fn column_selection_keeps_order() {
        let m = FeatureMatrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let s = m.select_columns(&[2, 0]).unwrap();
        assert_eq!(s.n_cols(), 2);
        assert_eq!(s.values(), &[3.0, 1.0, 6.0, 4.0]);
        assert!(m.select_columns(&[3]).is_err());
    }

    #[test]
    fn label_names_must_cover_ids() {
        let names = LabelVector::default_taxonomy();
        assert!(LabelVector::new(vec![0, 1, 2], names.clone()).is_ok());
        assert!(LabelVector::new(vec![0, 3], names).is_err());
        let lv = LabelVector::new(vec![2, 0], LabelVector::default_taxonomy()).unwrap();
        assert_eq!(lv.class_id("Viral"), Some(2));
    }
}

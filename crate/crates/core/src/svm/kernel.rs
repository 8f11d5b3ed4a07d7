use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::featurestore::FeatureMatrix;

/// Gram matrices up to this many rows are computed in full; larger problems
/// compute rows on demand through a bounded cache.
pub const FULL_GRAM_LIMIT: usize = 4096;
const ROW_CACHE_BYTES: usize = 256 << 20;

/// `exp(-gamma * ||x - z||^2)`.
pub fn rbf_kernel(x: &[f32], z: &[f32], gamma: f64) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::invalid(format!("kernel inputs have {} and {} features", x.len(), z.len())));
    }
    Ok((-gamma * squared_distance(x, z)).exp())
}

#[inline]
pub(crate) fn squared_distance(x: &[f32], z: &[f32]) -> f64 {
    x.iter()
        .zip(z)
        .map(|(&a, &b)| {
            let d = f64::from(a) - f64::from(b);
            d * d
        })
        .sum()
}

/// Row-major `n x n` squared distances.
pub(crate) fn pairwise_squared_distances(x: &FeatureMatrix) -> Vec<f64> {
    let n = x.n_rows();
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
        let xi = x.row(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v = squared_distance(xi, x.row(j));
        }
    });
    out
}

/// Row-major `a.n_rows() x b.n_rows()` squared distances.
pub(crate) fn cross_squared_distances(a: &FeatureMatrix, b: &FeatureMatrix) -> Vec<f64> {
    let m = b.n_rows();
    let mut out = vec![0.0; a.n_rows() * m];
    out.par_chunks_mut(m.max(1)).enumerate().for_each(|(i, row)| {
        let ai = a.row(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v = squared_distance(ai, b.row(j));
        }
    });
    out
}

enum Source<'a> {
    Data(&'a FeatureMatrix),
    SqDist(&'a [f64]),
}

/// RBF Gram matrix rows for the SMO solver.
pub(crate) struct KernelMatrix<'a> {
    n: usize,
    gamma: f64,
    source: Source<'a>,
    rows: Vec<Option<Arc<[f64]>>>,
    resident: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelMatrix<'a> {
    pub fn from_data(x: &'a FeatureMatrix, gamma: f64) -> Self {
        let n = x.n_rows();
        let mut k = Self::empty(n, gamma, Source::Data(x));
        if n <= FULL_GRAM_LIMIT {
            let sq = pairwise_squared_distances(x);
            k.fill_all(&sq);
        }
        k
    }

    pub fn from_squared_distances(sq: &'a [f64], n: usize, gamma: f64) -> Self {
        debug_assert_eq!(sq.len(), n * n);
        let mut k = Self::empty(n, gamma, Source::SqDist(sq));
        if n <= FULL_GRAM_LIMIT {
            k.fill_all(sq);
        }
        k
    }

    fn empty(n: usize, gamma: f64, source: Source<'a>) -> Self {
        let capacity = (ROW_CACHE_BYTES / (8 * n.max(1))).clamp(2, n.max(2));
        Self { n, gamma, source, rows: vec![None; n], resident: VecDeque::new(), capacity }
    }

    fn fill_all(&mut self, sq: &[f64]) {
        let gamma = self.gamma;
        let n = self.n;
        self.rows = sq
            .par_chunks(n.max(1))
            .map(|r| Some(r.iter().map(|&d| (-gamma * d).exp()).collect::<Arc<[f64]>>()))
            .collect();
        self.capacity = n;
    }

    pub fn diag(&self, _i: usize) -> f64 {
        1.0
    }

    pub fn row(&mut self, i: usize) -> Arc<[f64]> {
        if let Some(r) = &self.rows[i] {
            return Arc::clone(r);
        }
        let gamma = self.gamma;
        let row: Arc<[f64]> = match self.source {
            Source::Data(x) => {
                let xi = x.row(i);
                (0..self.n).map(|j| (-gamma * squared_distance(xi, x.row(j))).exp()).collect()
            }
            Source::SqDist(sq) => sq[i * self.n..(i + 1) * self.n].iter().map(|&d| (-gamma * d).exp()).collect(),
        };
        if self.resident.len() >= self.capacity {
            if let Some(old) = self.resident.pop_front() {
                self.rows[old] = None;
            }
        }
        self.resident.push_back(i);
        self.rows[i] = Some(Arc::clone(&row));
        row
    }
}

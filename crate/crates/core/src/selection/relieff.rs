//! ReliefF with k nearest hits and misses.
//!
//! Distances are Manhattan over min-max normalized features, so every
//! per-feature diff lies in `[0, 1]` and the final weights in `[-1, 1]`.
//! Neighbor ties are broken by ascending row index. With
//! `n_sample_rounds == n` every row is used once, in index order; smaller
//! values draw a seeded subset of rows without replacement.

use rayon::prelude::*;

use super::{ScoreMethod, ScoreVector};
use crate::error::{Error, Result};
use crate::featurestore::{FeatureMatrix, LabelVector};
use crate::rng;

pub const DEFAULT_K_NEIGHBORS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReliefParams {
    pub k_neighbors: usize,
    /// `None` means one round per row.
    pub n_sample_rounds: Option<usize>,
    pub seed: u64,
}

impl Default for ReliefParams {
    fn default() -> Self {
        Self { k_neighbors: DEFAULT_K_NEIGHBORS, n_sample_rounds: None, seed: 0 }
    }
}

/// Neighbors of one sampled row: `(weight, rows)` per class, where the
/// weight is `-1/k` for hits and `P(C) / (1 - P(class(R))) / k` for misses.
struct NeighborSet {
    groups: Vec<(f64, Vec<usize>)>,
}

pub fn relieff_scores(matrix: &FeatureMatrix, labels: &LabelVector, params: ReliefParams) -> Result<ScoreVector> {
    labels.check_rows(matrix)?;
    let n = matrix.n_rows();
    let d = matrix.n_cols();
    let k = params.k_neighbors;
    let members = labels.members();
    if members.len() < 2 {
        return Err(Error::invalid("ReliefF needs at least two classes"));
    }
    let smallest = members.values().map(Vec::len).min().unwrap_or(0);
    if k == 0 || k + 1 > smallest {
        return Err(Error::invalid(format!(
            "k_neighbors = {k} must be in 1..={} (smallest class size minus one)",
            smallest.saturating_sub(1)
        )));
    }
    let rounds = params.n_sample_rounds.unwrap_or(n);
    if rounds == 0 || rounds > n {
        return Err(Error::invalid(format!("n_sample_rounds = {rounds} must be in 1..={n}")));
    }
    let sampled: Vec<usize> = if rounds == n {
        (0..n).collect()
    } else {
        let all: Vec<usize> = (0..n).collect();
        let mut s = rng::sample_without_replacement(&all, rounds, &mut rng::seeded(params.seed));
        s.sort_unstable();
        s
    };

    let inv_range = inverse_ranges(matrix);
    let y = labels.labels();
    let prior = |c: u32| members[&c].len() as f64 / n as f64;

    let neighbor_sets: Vec<NeighborSet> = sampled
        .par_iter()
        .map(|&r| {
            let row_r = matrix.row(r);
            let dist: Vec<f64> = (0..n)
                .map(|j| manhattan(row_r, matrix.row(j), &inv_range))
                .collect();
            let own = y[r];
            let miss_scale = 1.0 / (1.0 - prior(own));
            let groups = members
                .iter()
                .map(|(&c, rows)| {
                    let nearest = k_nearest(rows, r, &dist, k);
                    let w = if c == own { -1.0 / k as f64 } else { prior(c) * miss_scale / k as f64 };
                    (w, nearest)
                })
                .collect();
            NeighborSet { groups }
        })
        .collect();

    // Fixed-order accumulation per feature; independent of thread count.
    let m = sampled.len() as f64;
    let scores: Vec<f64> = (0..d)
        .into_par_iter()
        .map(|f| {
            let inv = inv_range[f];
            if inv == 0.0 {
                return 0.0;
            }
            let mut w = 0.0f64;
            for (&r, set) in sampled.iter().zip(&neighbor_sets) {
                let x = f64::from(matrix.get(r, f));
                for (weight, rows) in &set.groups {
                    let s: f64 = rows.iter().map(|&j| (x - f64::from(matrix.get(j, f))).abs() * inv).sum();
                    w += weight * s;
                }
            }
            w / m
        })
        .collect();

    Ok(ScoreVector {
        scores,
        method: ScoreMethod::Relieff { k_neighbors: k, n_sample_rounds: rounds, seed: params.seed },
    })
}

/// `1 / (max - min)` per feature, or 0 for a constant feature.
fn inverse_ranges(matrix: &FeatureMatrix) -> Vec<f64> {
    let d = matrix.n_cols();
    let mut lo = vec![f32::INFINITY; d];
    let mut hi = vec![f32::NEG_INFINITY; d];
    for row in matrix.rows() {
        for (f, &x) in row.iter().enumerate() {
            lo[f] = lo[f].min(x);
            hi[f] = hi[f].max(x);
        }
    }
    lo.iter()
        .zip(&hi)
        .map(|(&l, &h)| {
            let range = f64::from(h) - f64::from(l);
            if range > 0.0 { 1.0 / range } else { 0.0 }
        })
        .collect()
}

#[inline]
fn manhattan(a: &[f32], b: &[f32], inv_range: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(inv_range)
        .map(|((&x, &z), &inv)| (f64::from(x) - f64::from(z)).abs() * inv)
        .sum()
}

/// The `k` rows of `candidates` (excluding `exclude`) closest by `dist`,
/// ordered by (distance, index).
fn k_nearest(candidates: &[usize], exclude: usize, dist: &[f64], k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = candidates.iter().copied().filter(|&j| j != exclude).collect();
    let cmp = |a: &usize, b: &usize| dist[*a].total_cmp(&dist[*b]).then(a.cmp(b));
    if pool.len() > k {
        pool.select_nth_unstable_by(k - 1, cmp);
        pool.truncate(k);
    }
    pool.sort_by(cmp);
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(values: &[f32], ids: &[u32]) -> (FeatureMatrix, LabelVector) {
        let rows: Vec<[f32; 1]> = values.iter().map(|&v| [v]).collect();
        (FeatureMatrix::from_rows(&rows).unwrap(), LabelVector::from_ids(ids.to_vec()))
    }

    fn k1() -> ReliefParams {
        ReliefParams { k_neighbors: 1, ..Default::default() }
    }

    #[test]
    fn separated_clusters_score_positive() {
        let (m, y) = one_d(&[0.0, 0.1, 0.9, 1.0], &[0, 0, 1, 1]);
        let s = relieff_scores(&m, &y, k1()).unwrap();
        // per-row contributions: 0.8, 0.7, 0.7, 0.8 (hit diff 0.1, miss diffs 0.9/0.8/0.8/0.9)
        assert!((s.scores[0] - 0.75).abs() < 1e-6, "{}", s.scores[0]);
    }

    #[test]
    fn interleaved_classes_score_non_positive() {
        let (m, y) = one_d(&[0.0, 1.0, 0.0, 1.0], &[0, 0, 1, 1]);
        let s = relieff_scores(&m, &y, k1()).unwrap();
        assert!(s.scores[0] <= 0.0);
    }

    #[test]
    fn constant_feature_scores_zero() {
        let m = FeatureMatrix::from_rows(&[[3.0f32, 0.0], [3.0, 1.0], [3.0, 5.0], [3.0, 6.0]]).unwrap();
        let y = LabelVector::from_ids(vec![0, 0, 1, 1]);
        let s = relieff_scores(&m, &y, k1()).unwrap();
        assert_eq!(s.scores[0], 0.0);
        assert!(s.scores[1] > 0.0);
    }

    #[test]
    fn parameter_errors() {
        let (m, y) = one_d(&[0.0, 0.1, 0.9, 1.0], &[0, 0, 1, 1]);
        let p = |k, r| ReliefParams { k_neighbors: k, n_sample_rounds: r, seed: 0 };
        assert!(relieff_scores(&m, &y, p(2, None)).is_err());
        assert!(relieff_scores(&m, &y, p(0, None)).is_err());
        assert!(relieff_scores(&m, &y, p(1, Some(5))).is_err());
        assert!(relieff_scores(&m, &y, p(1, Some(0))).is_err());
        let (m1, y1) = one_d(&[0.0, 0.1], &[0, 0]);
        assert!(relieff_scores(&m1, &y1, k1()).is_err());
    }

    #[test]
    fn subsampled_rounds_are_seeded() {
        let vals: Vec<f32> = (0..40).map(|i| (i as f32 * 0.37).sin()).collect();
        let ids: Vec<u32> = (0..40).map(|i| (i % 2) as u32).collect();
        let (m, y) = one_d(&vals, &ids);
        let p = |seed| ReliefParams { k_neighbors: 3, n_sample_rounds: Some(10), seed };
        let a = relieff_scores(&m, &y, p(1)).unwrap();
        assert_eq!(a, relieff_scores(&m, &y, p(1)).unwrap());
        assert!(a.scores[0].abs() <= 1.0);
    }
}

//! Chi-square relevance on equal-frequency discretized features.

use rayon::prelude::*;

use super::{ScoreMethod, ScoreVector};
use crate::error::{Error, Result};
use crate::featurestore::{FeatureMatrix, LabelVector};

pub const DEFAULT_BINS: usize = 10;

/// Equal-frequency bin of every value.
///
/// Values are sorted; the value at sorted position `p` would land in bin
/// `floor(p * n_bins / n)`, and all copies of a value share the bin of its
/// first position, so ties never straddle a boundary. Bin ids are
/// non-decreasing in the value but may skip numbers.
pub fn equal_frequency_bins(column: &[f32], n_bins: usize) -> Vec<usize> {
    let n = column.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));
    let mut bins = vec![0usize; n];
    let mut first = 0;
    for p in 0..n {
        if p > 0 && column[order[p]] != column[order[p - 1]] {
            first = p;
        }
        bins[order[p]] = first * n_bins / n;
    }
    bins
}

/// Pearson chi-square of each feature's bin x class contingency table.
/// Empty bins do not appear in the table.
pub fn chi_square_scores(matrix: &FeatureMatrix, labels: &LabelVector, n_bins: usize) -> Result<ScoreVector> {
    labels.check_rows(matrix)?;
    if n_bins < 2 {
        return Err(Error::invalid(format!("n_bins = {n_bins} must be at least 2")));
    }
    let n = matrix.n_rows();
    let class_ids: Vec<u32> = labels.members().keys().copied().collect();
    let class_index: Vec<usize> = labels
        .labels()
        .iter()
        .map(|l| class_ids.binary_search(l).unwrap())
        .collect();
    let mut class_totals = vec![0.0f64; class_ids.len()];
    for &c in &class_index {
        class_totals[c] += 1.0;
    }

    let scores = (0..matrix.n_cols())
        .into_par_iter()
        .map_init(
            || (vec![0f32; n], vec![0f64; n_bins * class_ids.len()]),
            |(column, table), f| {
                for (r, v) in column.iter_mut().enumerate() {
                    *v = matrix.get(r, f);
                }
                let bins = equal_frequency_bins(column, n_bins);
                table.fill(0.0);
                for (r, &b) in bins.iter().enumerate() {
                    table[b * class_ids.len() + class_index[r]] += 1.0;
                }
                chi_square_statistic(table, &class_totals, n as f64)
            },
        )
        .collect();
    Ok(ScoreVector { scores, method: ScoreMethod::Chi2 { n_bins } })
}

/// `table` is row-major bins x classes.
fn chi_square_statistic(table: &[f64], class_totals: &[f64], n: f64) -> f64 {
    let k = class_totals.len();
    let mut chi2 = 0.0;
    for bin in table.chunks_exact(k) {
        let bin_total: f64 = bin.iter().sum();
        if bin_total == 0.0 {
            continue;
        }
        for (&observed, &class_total) in bin.iter().zip(class_totals) {
            let expected = bin_total * class_total / n;
            chi2 += (observed - expected).powi(2) / expected;
        }
    }
    chi2
}

//! Filter feature selection: per-feature relevance scores, ranking, and an
//! elbow cutoff on the ranked-score curve.
//!
//! Scores should be computed on training rows only; callers slice the matrix
//! before scoring.

mod chi2;
mod elbow;
mod export;
mod relieff;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurestore::FeatureMatrix;

pub use chi2::{chi_square_scores, equal_frequency_bins, DEFAULT_BINS};
pub use elbow::{chord_distances, elbow_cutoff};
pub use export::{read_scores_csv, write_curve_csv, write_scores_csv};
pub use relieff::{relieff_scores, ReliefParams, DEFAULT_K_NEIGHBORS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum ScoreMethod {
    Relieff { k_neighbors: usize, n_sample_rounds: usize, seed: u64 },
    Chi2 { n_bins: usize },
    /// Scores loaded from a CSV export; the producing method is unknown.
    Imported,
}

/// One relevance score per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    pub method: ScoreMethod,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Feature indices ordered by descending score, ties by ascending index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    pub order: Vec<usize>,
}

impl Ranking {
    /// Scores along the ranking (non-increasing).
    pub fn sorted_scores(&self, scores: &ScoreVector) -> Vec<f64> {
        self.order.iter().map(|&i| scores.scores[i]).collect()
    }

    /// 1-based rank of every feature, indexed by feature.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (pos, &f) in self.order.iter().enumerate() {
            ranks[f] = pos + 1;
        }
        ranks
    }
}

pub fn rank_features(scores: &ScoreVector) -> Ranking {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores.scores[b].total_cmp(&scores.scores[a]).then(a.cmp(&b)));
    Ranking { order }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub cutoff_k: usize,
    pub selected: Vec<usize>,
}

impl SelectionResult {
    /// Keeps the first `k` features of `ranking`.
    pub fn top_k(ranking: &Ranking, k: usize) -> Result<Self> {
        if k == 0 || k > ranking.order.len() {
            return Err(Error::invalid(format!(
                "cutoff {k} outside 1..={}",
                ranking.order.len()
            )));
        }
        Ok(Self { cutoff_k: k, selected: ranking.order[..k].to_vec() })
    }

    /// Ranks the scores and keeps everything above the elbow.
    pub fn elbow(scores: &ScoreVector) -> Result<Self> {
        let ranking = rank_features(scores);
        let k = elbow_cutoff(&ranking.sorted_scores(scores))?;
        Self::top_k(&ranking, k)
    }
}

/// Column-slices `matrix` to the selected features, in selection order.
pub fn select_subset(matrix: &FeatureMatrix, selection: &SelectionResult) -> Result<FeatureMatrix> {
    matrix.select_columns(&selection.selected)
}

/// How much a selection shrank the feature space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub initial_dims: usize,
    pub retained_dims: usize,
    /// `1 - retained / initial`
    pub reduction_ratio: f64,
}

impl ReductionSummary {
    pub fn new(initial_dims: usize, retained_dims: usize) -> Result<Self> {
        if initial_dims == 0 || retained_dims > initial_dims {
            return Err(Error::invalid(format!(
                "cannot retain {retained_dims} of {initial_dims} features"
            )));
        }
        Ok(Self {
            initial_dims,
            retained_dims,
            reduction_ratio: 1.0 - retained_dims as f64 / initial_dims as f64,
        })
    }

    pub fn percent(&self) -> String {
        format!("{:.2}%", 100.0 * self.reduction_ratio)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn sv(scores: Vec<f64>) -> ScoreVector {
        ScoreVector { scores, method: ScoreMethod::Imported }
    }

    #[test]
    fn ranking_examples() {
        assert_eq!(rank_features(&sv(vec![0.1, 0.9, 0.5])).order, vec![1, 2, 0]);
        assert_eq!(rank_features(&sv(vec![0.3; 5])).order, vec![0, 1, 2, 3, 4]);
        assert_eq!(rank_features(&sv(vec![0.1, 0.9, 0.5])).ranks(), vec![3, 1, 2]);
    }

    #[test]
    fn subset_examples() {
        let m = FeatureMatrix::from_rows(&[[1.0f32, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let all = SelectionResult { cutoff_k: 3, selected: vec![0, 1, 2] };
        assert_eq!(select_subset(&m, &all).unwrap(), m);
        let two = SelectionResult { cutoff_k: 2, selected: vec![2, 0] };
        let s = select_subset(&m, &two).unwrap();
        assert_eq!(s.values(), &[3.0, 1.0, 6.0, 4.0]);
        let bad = SelectionResult { cutoff_k: 1, selected: vec![5] };
        assert!(matches!(select_subset(&m, &bad), Err(Error::InvalidInput(_))));

        let r = rank_features(&sv(vec![0.2, 0.1, 0.4, 0.3]));
        let top = SelectionResult::top_k(&r, 2).unwrap();
        assert_eq!(select_subset(&m.select_columns(&[0, 1, 2, 0]).unwrap(), &top).unwrap().n_cols(), 2);
        assert!(SelectionResult::top_k(&r, 0).is_err());
        assert!(SelectionResult::top_k(&r, 5).is_err());
    }

    #[test]
    fn reduction_ratios() {
        let relief = ReductionSummary::new(100_000, 6_000).unwrap();
        assert_eq!(relief.percent(), "94.00%");
        let chi2 = ReductionSummary::new(100_000, 15_000).unwrap();
        assert_eq!(chi2.percent(), "85.00%");
        assert!(ReductionSummary::new(10, 11).is_err());
    }

    proptest! {
        #[test]
        fn ranking_matches_reference_sort(scores in prop::collection::vec(-5i32..5, 0..60)) {
            let s = sv(scores.iter().map(|&v| f64::from(v) * 0.25).collect());
            let r = rank_features(&s);
            // reference: stable sort of (−score, index) pairs
            let mut pairs: Vec<(i32, usize)> = scores.iter().enumerate().map(|(i, &v)| (-v, i)).collect();
            pairs.sort();
            let expected: Vec<usize> = pairs.into_iter().map(|p| p.1).collect();
            prop_assert_eq!(&r.order, &expected);
            let sorted = r.sorted_scores(&s);
            prop_assert!(sorted.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}

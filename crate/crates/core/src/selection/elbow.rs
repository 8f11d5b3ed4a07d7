//! Elbow cutoff on a ranked-score curve.
//!
//! Both axes are min-max normalized, so the chord runs from `(0, 1)` to
//! `(1, 0)` and the distance of point `i` to it is `|1 - x_i - y_i| / sqrt(2)`.
//! The knee is the interior point farthest from the chord; the cutoff keeps
//! everything up to and including it.

use crate::error::{Error, Result};

/// Distances at or below this are treated as lying on the chord.
const ON_CHORD: f64 = 1e-12;

/// Normalized perpendicular distance of every point to the chord. The
/// endpoints are always 0. A flat curve yields all zeros.
pub fn chord_distances(sorted_scores: &[f64]) -> Vec<f64> {
    let d = sorted_scores.len();
    let (first, last) = (sorted_scores[0], sorted_scores[d - 1]);
    let span = first - last;
    if span <= 0.0 || d < 2 {
        return vec![0.0; d];
    }
    sorted_scores
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let x = i as f64 / (d - 1) as f64;
            let y = (s - last) / span;
            (1.0 - x - y).abs() / std::f64::consts::SQRT_2
        })
        .collect()
}

/// Number of features to keep: `1 + argmax` of the chord distance over
/// interior points, smallest index on ties. A curve with every interior point
/// on the chord (linear or flat) keeps a single feature.
pub fn elbow_cutoff(sorted_scores: &[f64]) -> Result<usize> {
    if sorted_scores.len() < 3 {
        return Err(Error::invalid(format!(
            "elbow needs at least 3 scores, got {}",
            sorted_scores.len()
        )));
    }
    if let Some(i) = sorted_scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::invalid(format!("score {i} is not finite")));
    }
    if let Some(i) = sorted_scores.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::invalid(format!("scores increase at position {}", i + 1)));
    }
    let dist = chord_distances(sorted_scores);
    let interior = &dist[1..dist.len() - 1];
    let (mut best, mut best_d) = (0usize, ON_CHORD);
    for (i, &di) in interior.iter().enumerate() {
        if di > best_d {
            best = i + 1;
            best_d = di;
        }
    }
    Ok(if best == 0 { 1 } else { best + 1 })
}

use std::path::Path;

use super::{rank_features, ScoreMethod, ScoreVector};
use crate::error::{Error, Result};
use crate::featurestore::write_atomic;

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::invalid(format!("{}: {e}", path.display()))
}

/// Scores as CSV `feature_index,score,rank`, one row per feature in index
/// order; rank is 1-based. Scores use the shortest round-tripping decimal.
pub fn write_scores_csv(scores: &ScoreVector, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ranks = rank_features(scores).ranks();
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e| csv_err(path, e);
    w.write_record(["feature_index", "score", "rank"]).map_err(err)?;
    for (i, (s, r)) in scores.scores.iter().zip(&ranks).enumerate() {
        w.write_record([i.to_string(), s.to_string(), r.to_string()]).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_scores_csv(path: impl AsRef<Path>) -> Result<ScoreVector> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
        let idx = field(0)
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("{}: bad feature_index {:?}", path.display(), field(0))))?;
        let score = field(1)
            .parse::<f64>()
            .ok()
            .filter(|s| s.is_finite())
            .ok_or_else(|| Error::invalid(format!("{}: bad score {:?}", path.display(), field(1))))?;
        rows.push((idx, score));
    }
    rows.sort_by_key(|r| r.0);
    if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
        return Err(Error::invalid(format!(
            "{}: feature_index column must cover 0..{} exactly once",
            path.display(),
            rows.len()
        )));
    }
    Ok(ScoreVector { scores: rows.into_iter().map(|r| r.1).collect(), method: ScoreMethod::Imported })
}

/// Ranked-score curve as CSV `rank,feature_index,score`, best feature first.
pub fn write_curve_csv(scores: &ScoreVector, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ranking = rank_features(scores);
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e| csv_err(path, e);
    w.write_record(["rank", "feature_index", "score"]).map_err(err)?;
    for (pos, &f) in ranking.order.iter().enumerate() {
        w.write_record([(pos + 1).to_string(), f.to_string(), scores.scores[f].to_string()])
            .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

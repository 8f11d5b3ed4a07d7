use super::LabelVector;
use crate::error::{Error, Result};
use crate::rng;

/// Downsamples every class to the size of the smallest one.
///
/// Classes are visited in ascending id order and each draws a uniform
/// subset from one shared seeded stream. The result is sorted ascending.
pub fn balance_downsample(labels: &LabelVector, seed: u64) -> Result<Vec<usize>> {
    let members = labels.members();
    if members.len() < 2 {
        return Err(Error::invalid(format!(
            "balancing needs at least 2 classes, found {}",
            members.len()
        )));
    }
    let m = members.values().map(Vec::len).min().unwrap_or(0);
    let mut rng = rng::seeded(seed);
    let mut out = Vec::with_capacity(m * members.len());
    for rows in members.values() {
        out.extend(rng::sample_without_replacement(rows, m, &mut rng));
    }
    out.sort_unstable();
    Ok(out)
}

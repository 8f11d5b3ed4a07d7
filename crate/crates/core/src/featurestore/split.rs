use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::LabelVector;
use crate::error::{Error, Result};
use crate::rng;

/// Nominal stratum fractions, kept for reporting. The splitter itself works
/// with exact integer weights: test2 takes 1/10 of each class, and the rest
/// is divided 3:1:1 into train/val/test1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub test2: f64,
    pub train: f64,
    pub val: f64,
    pub test1: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self { test2: 0.10, train: 0.60, val: 0.20, test1: 0.20 }
    }
}

const TEST2_WEIGHTS: [u64; 2] = [1, 9];
const REST_WEIGHTS: [u64; 3] = [3, 1, 1];

/// Hold-out partition of dataset rows into four disjoint strata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train_idx: Vec<usize>,
    pub val_idx: Vec<usize>,
    pub test1_idx: Vec<usize>,
    pub test2_idx: Vec<usize>,
    pub seed: u64,
    pub fractions: SplitFractions,
}

impl SplitPlan {
    pub fn strata(&self) -> [(&'static str, &[usize]); 4] {
        [
            ("training", &self.train_idx),
            ("validation", &self.val_idx),
            ("test1", &self.test1_idx),
            ("test2", &self.test2_idx),
        ]
    }

    pub fn len(&self) -> usize {
        self.strata().iter().map(|(_, s)| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Largest-remainder apportionment of `n` items by integer `weights`.
///
/// Each part first gets `floor(n * w / W)`; leftover units go to the parts
/// with the largest remainders, earlier parts winning ties.
pub fn apportion(n: usize, weights: &[u64]) -> Vec<usize> {
    let total: u64 = weights.iter().sum();
    assert!(total > 0, "apportion needs a positive total weight");
    let n64 = n as u64;
    let mut parts: Vec<usize> = weights.iter().map(|w| (n64 * w / total) as usize).collect();
    let mut rema: Vec<(u64, usize)> = weights.iter().enumerate().map(|(i, w)| (n64 * w % total, i)).collect();
    // descending remainder, ascending position
    rema.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let leftover = n - parts.iter().sum::<usize>();
    for &(_, i) in rema.iter().take(leftover) {
        parts[i] += 1;
    }
    parts
}

/// Stratified hold-out split of `indices`.
///
/// Per class (ascending id, one shared seeded stream): shuffle the class's
/// rows, carve off test2 first, then split the remainder 60/20/20 into
/// train/val/test1. Every stratum is returned sorted.
pub fn split_holdout(indices: &[usize], labels: &LabelVector, seed: u64) -> Result<SplitPlan> {
    if let Some(&i) = indices.iter().find(|&&i| i >= labels.len()) {
        return Err(Error::invalid(format!("index {i} out of range for {} labels", labels.len())));
    }
    let unique: BTreeSet<usize> = indices.iter().copied().collect();
    if unique.len() != indices.len() {
        return Err(Error::invalid("split indices contain duplicates"));
    }
    let members = labels.members_of(indices.iter().copied());
    if let Some((id, rows)) = members.iter().find(|(_, rows)| rows.len() < 10) {
        return Err(Error::invalid(format!(
            "class {id} has {} rows; at least 10 are needed to fill all four strata",
            rows.len()
        )));
    }

    let mut rng = rng::seeded(seed);
    let mut plan = SplitPlan {
        train_idx: Vec::new(),
        val_idx: Vec::new(),
        test1_idx: Vec::new(),
        test2_idx: Vec::new(),
        seed,
        fractions: SplitFractions::default(),
    };
    for rows in members.values() {
        let mut rows = rows.clone();
        rng::shuffle(&mut rows, &mut rng);
        let [n_test2, n_rest] = apportion(rows.len(), &TEST2_WEIGHTS)[..] else { unreachable!() };
        let (test2, rest) = rows.split_at(n_test2);
        debug_assert_eq!(rest.len(), n_rest);
        let sizes = apportion(rest.len(), &REST_WEIGHTS);
        let (train, rest) = rest.split_at(sizes[0]);
        let (val, test1) = rest.split_at(sizes[1]);
        plan.test2_idx.extend_from_slice(test2);
        plan.train_idx.extend_from_slice(train);
        plan.val_idx.extend_from_slice(val);
        plan.test1_idx.extend_from_slice(test1);
    }
    for s in [&mut plan.train_idx, &mut plan.val_idx, &mut plan.test1_idx, &mut plan.test2_idx] {
        s.sort_unstable();
    }
    Ok(plan)
}

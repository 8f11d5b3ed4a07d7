//! Labeled Gaussian feature sets with a known informative column set, used
//! by the test suite and the `synth` subcommand.
//!
//! Every value is drawn from N(0, 1). On informative columns, rows of class
//! `c` additionally get a mean shift of `c * shift` (so `shift` is in units
//! of the noise standard deviation). Rows cycle through the classes in order.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurestore::{FeatureMatrix, LabelVector};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_per_class: usize,
    pub n_classes: u32,
    pub d: usize,
    pub informative: Vec<usize>,
    pub shift: f64,
    pub seed: u64,
}

pub fn synth_features(spec: &SynthSpec) -> Result<(FeatureMatrix, LabelVector)> {
    if let Some(&bad) = spec.informative.iter().find(|&&i| i >= spec.d) {
        return Err(Error::invalid(format!("informative column {bad} is outside 0..{}", spec.d)));
    }
    if spec.n_classes < 2 || spec.n_per_class == 0 || spec.d == 0 {
        return Err(Error::invalid("synthetic data needs >= 2 classes, >= 1 row per class and >= 1 column"));
    }
    if !spec.shift.is_finite() {
        return Err(Error::invalid("shift must be finite"));
    }
    let n = spec.n_per_class * spec.n_classes as usize;
    let mut rng = rng::seeded(spec.seed);
    let mut informative = vec![false; spec.d];
    for &i in &spec.informative {
        informative[i] = true;
    }
    let mut values = Vec::with_capacity(n * spec.d);
    let mut labels = Vec::with_capacity(n);
    for r in 0..n {
        let class = (r % spec.n_classes as usize) as u32;
        labels.push(class);
        for &inf in &informative {
            let z: f64 = StandardNormal.sample(&mut rng);
            let mean = if inf { class as f64 * spec.shift } else { 0.0 };
            values.push((z + mean) as f32);
        }
    }
    let matrix = FeatureMatrix::new(n, spec.d, values)?;
    let labels = if spec.n_classes == 3 {
        LabelVector::new(labels, LabelVector::default_taxonomy())?
    } else {
        LabelVector::from_ids(labels)
    };
    Ok((matrix, labels))
}

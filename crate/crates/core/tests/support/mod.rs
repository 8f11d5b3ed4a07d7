#![allow(dead_code)]

pub mod data;
pub mod oracles;
pub mod qp;

use cxr_core::svm::{smo_train, Sign, SmoConfig, SvmHyperparams};
use cxr_core::FeatureMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SvmInstance {
    pub x: FeatureMatrix,
    pub x64: Vec<Vec<f64>>,
    pub y: Vec<Sign>,
    pub y64: Vec<f64>,
    pub c: f64,
    pub gamma: f64,
}

/// Random small SVM problem: n in 4..=max_n, d in 1..=5, both classes present.
pub fn svm_instance(seed: u64, max_n: usize) -> SvmInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    let n = rng.random_range(4..=max_n);
    let d = rng.random_range(1..=5);
    let rows: Vec<Vec<f32>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0f32..1.0)).collect()).collect();
    let mut y: Vec<Sign> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    y[0] = 1;
    y[1] = -1;
    let c = 10f64.powf(rng.random_range(-1.0..1.0));
    let gamma = 10f64.powf(rng.random_range(-0.7..0.5));
    SvmInstance {
        x: FeatureMatrix::from_rows(&rows).unwrap(),
        x64: rows.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect(),
        y64: y.iter().map(|&v| f64::from(v)).collect(),
        y,
        c,
        gamma,
    }
}

/// Compares SMO against the interior-point reference. When the optimal bias
/// is not unique (no multiplier strictly inside the box), the expansion
/// parts are compared and our bias must lie in the optimal interval.
pub fn compare_with_qp(seed: u64, config: SmoConfig) -> (f64, f64) {
    let inst = svm_instance(seed, 20);
    let params = SvmHyperparams::new(inst.c, inst.gamma).unwrap();
    let model = smo_train(&inst.x, &inst.y, params, config).unwrap();
    let oracle = qp::solve_dual(&inst.x64, &inst.y64, inst.c, inst.gamma);
    let dobj = (model.stats.dual_objective - oracle.objective).abs();
    let ours = model.decision_values(&inst.x).unwrap();
    let mut ddec = 0.0f64;
    for (p, f) in inst.x64.iter().zip(&ours) {
        let e = qp::expansion(&inst.x64, &inst.y64, &oracle, inst.gamma, p);
        let gap = if oracle.bias_is_unique() {
            (f - (e + oracle.bias_lo)).abs()
        } else {
            let b = model.bias.clamp(oracle.bias_lo, oracle.bias_hi);
            (f - (e + b)).abs().max((model.bias - b).abs())
        };
        ddec = ddec.max(gap);
    }
    (dobj, ddec)
}

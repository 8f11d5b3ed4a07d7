mod support;

use cxr_core::svm::SmoConfig;
use support::compare_with_qp as compare;

#[test]
fn smo_matches_qp_oracle_on_random_instances() {
    let cfg = SmoConfig { tol: 1e-5, max_passes: None };
    let mut worst = (0.0f64, 0.0f64);
    for seed in 0..100 {
        let (dobj, ddec) = compare(seed, cfg);
        println!("seed {seed}: dobj={dobj:.2e} ddec={ddec:.2e}");
        worst = (worst.0.max(dobj), worst.1.max(ddec));
    }
    println!("worst objective gap {:.3e}, worst decision gap {:.3e}", worst.0, worst.1);
    assert!(worst.0 <= 1e-4);
    assert!(worst.1 <= 1e-3);
}

#[test]
fn default_tolerance_objective() {
    let mut worst = 0.0f64;
    for seed in 0..100 {
        worst = worst.max(compare(seed, SmoConfig::default()).0);
    }
    println!("default tol: worst objective gap {worst:.3e}");
    assert!(worst <= 1e-4);
}

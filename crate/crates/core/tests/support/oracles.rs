#![allow(clippy::needless_range_loop)]

//! Slow, direct reference computations used to check the library.

use cxr_core::bayesopt::{GpParams, LogPoint, Observation, SearchSpace};
use cxr_core::{FeatureMatrix, LabelVector};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------- ReliefF

pub struct ReliefInstance {
    pub x: FeatureMatrix,
    pub y: LabelVector,
    pub k: usize,
    pub rounds: usize,
    pub seed: u64,
}

/// n <= 50, d <= 10, 2 or 3 classes. Half the instances draw values from a
/// coarse grid so that distance ties are common.
pub fn relief_instance(seed: u64) -> ReliefInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e11ef);
    let n = rng.random_range(8..=50);
    let d = rng.random_range(1..=10);
    let n_classes = rng.random_range(2..=3u32);
    let coarse = rng.random_bool(0.5);
    let mut labels: Vec<u32> = (0..n).map(|i| (i as u32) % n_classes).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    let values: Vec<f32> = (0..n * d)
        .map(|_| if coarse { rng.random_range(0..4) as f32 * 0.5 } else { rng.random_range(-2.0f32..2.0) })
        .collect();
    // one constant column now and then
    let mut values = values;
    if d > 1 && rng.random_bool(0.3) {
        for r in 0..n {
            values[r * d] = 1.5;
        }
    }
    let smallest = (0..n_classes).map(|c| labels.iter().filter(|&&l| l == c).count()).min().unwrap();
    let k = rng.random_range(1..=smallest.saturating_sub(1).clamp(1, 10));
    let rounds = if rng.random_bool(0.5) { n } else { rng.random_range(1..=n) };
    ReliefInstance {
        x: FeatureMatrix::new(n, d, values).unwrap(),
        y: LabelVector::from_ids(labels),
        k,
        rounds,
        seed,
    }
}

/// Rows visited by ReliefF: all of them in order, or a seeded subset.
pub fn relief_rounds(n: usize, rounds: usize, seed: u64) -> Vec<usize> {
    if rounds == n {
        return (0..n).collect();
    }
    let all: Vec<usize> = (0..n).collect();
    let mut s = cxr_core::rng::sample_without_replacement(&all, rounds, &mut cxr_core::rng::seeded(seed));
    s.sort_unstable();
    s
}

/// Textbook ReliefF: for every visited row, full sort of each class by
/// (distance, index), then per-feature updates of hit and miss diffs.
pub fn naive_relieff(inst: &ReliefInstance) -> Vec<f64> {
    let (n, d) = (inst.x.n_rows(), inst.x.n_cols());
    let v = |r: usize, f: usize| inst.x.get(r, f) as f64;
    let y = inst.y.labels();
    let range: Vec<f64> = (0..d)
        .map(|f| {
            let col: Vec<f64> = (0..n).map(|r| v(r, f)).collect();
            col.iter().cloned().fold(f64::MIN, f64::max) - col.iter().cloned().fold(f64::MAX, f64::min)
        })
        .collect();
    let diff = |f: usize, a: usize, b: usize| if range[f] == 0.0 { 0.0 } else { (v(a, f) - v(b, f)).abs() / range[f] };
    let dist = |a: usize, b: usize| (0..d).map(|f| diff(f, a, b)).sum::<f64>();
    let prior = |c: u32| y.iter().filter(|&&l| l == c).count() as f64 / n as f64;
    let mut classes: Vec<u32> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let visited = relief_rounds(n, inst.rounds, inst.seed);
    let m = visited.len() as f64;
    let k = inst.k as f64;
    let mut w = vec![0.0; d];
    for &r in &visited {
        for &c in &classes {
            let mut cands: Vec<(f64, usize)> = (0..n).filter(|&j| j != r && y[j] == c).map(|j| (dist(r, j), j)).collect();
            cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let near: Vec<usize> = cands.iter().take(inst.k).map(|c| c.1).collect();
            for f in 0..d {
                let s: f64 = near.iter().map(|&j| diff(f, r, j)).sum();
                if c == y[r] {
                    w[f] -= s / (m * k);
                } else {
                    w[f] += prior(c) / (1.0 - prior(y[r])) * s / (m * k);
                }
            }
        }
    }
    w
}

// ------------------------------------------------------------- chi-square

/// Bin of each value by counting: `floor(#{values < v} * bins / n)`.
pub fn counted_bins(col: &[f32], bins: usize) -> Vec<usize> {
    let n = col.len();
    col.iter().map(|&v| col.iter().filter(|&&u| u < v).count() * bins / n).collect()
}

/// Pearson statistic from an explicit (bin, class) -> count table.
pub fn tabulated_chi2(col: &[f32], labels: &[u32], bins: usize) -> f64 {
    use std::collections::BTreeMap;
    let n = col.len() as f64;
    let b = counted_bins(col, bins);
    let mut table: BTreeMap<(usize, u32), f64> = BTreeMap::new();
    let mut rows: BTreeMap<usize, f64> = BTreeMap::new();
    let mut cols: BTreeMap<u32, f64> = BTreeMap::new();
    for (&bin, &c) in b.iter().zip(labels) {
        *table.entry((bin, c)).or_default() += 1.0;
        *rows.entry(bin).or_default() += 1.0;
        *cols.entry(c).or_default() += 1.0;
    }
    let mut chi2 = 0.0;
    for (&bin, &rt) in &rows {
        for (&c, &ct) in &cols {
            let e = rt * ct / n;
            let o = table.get(&(bin, c)).copied().unwrap_or(0.0);
            chi2 += (o - e) * (o - e) / e;
        }
    }
    chi2
}

// ------------------------------------------------------------------ elbow

/// Perpendicular distance to the end-to-end chord via the cross product,
/// axes scaled to [0, 1]; first maximizer wins; nothing above 1e-12 gives 1.
pub fn brute_force_elbow(scores: &[f64]) -> usize {
    let d = scores.len();
    let (lo, hi) = (scores[d - 1], scores[0]);
    if hi == lo {
        return 1;
    }
    let p = |i: usize| (i as f64 / (d - 1) as f64, (scores[i] - lo) / (hi - lo));
    let (a, b) = (p(0), p(d - 1));
    let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
    let mut best = (1e-12, 0usize);
    for i in 1..d - 1 {
        let q = p(i);
        let dist = ((b.0 - a.0) * (a.1 - q.1) - (a.0 - q.0) * (b.1 - a.1)).abs() / len;
        if dist > best.0 {
            best = (dist, i);
        }
    }
    if best.1 == 0 { 1 } else { best.1 + 1 }
}

/// `t` geometric points `r^i`, then a flat tail at `r^t`, `d` points in all.
/// For these parameters the knee is the first tail point, so the expected
/// cutoff is `t + 1`.
pub fn geometric_then_flat(t: usize, r: f64, d: usize) -> Vec<f64> {
    (0..d).map(|i| r.powi(i.min(t) as i32)).collect()
}

// --------------------------------------------------------------------- GP

/// Posterior mean and variance by explicit dense inverse.
pub fn dense_gp(obs: &[Observation], params: &GpParams, prior_mean: f64, jitter: f64, at: &LogPoint) -> (f64, f64) {
    let n = obs.len();
    let k = |a: &LogPoint, b: &LogPoint| {
        let dc = (a.log10_c - b.log10_c) / params.length_scales[0];
        let dg = (a.log10_gamma - b.log10_gamma) / params.length_scales[1];
        params.signal_var * (-0.5 * (dc * dc + dg * dg)).exp()
    };
    let kmat = DMatrix::from_fn(n, n, |i, j| {
        k(&obs[i].point, &obs[j].point) + if i == j { params.noise_var + jitter } else { 0.0 }
    });
    let inv = kmat.try_inverse().expect("invertible covariance");
    let kstar = DVector::from_fn(n, |i, _| k(&obs[i].point, at));
    let resid = DVector::from_fn(n, |i, _| obs[i].loss - prior_mean);
    let mean = prior_mean + (kstar.transpose() * &inv * resid)[(0, 0)];
    let var = params.signal_var - (kstar.transpose() * &inv * &kstar)[(0, 0)];
    (mean, var.max(0.0))
}

/// Up to 10 random observations of a smooth function inside the space.
pub fn gp_observations(seed: u64) -> Vec<Observation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a55);
    let space = SearchSpace::default();
    let n = rng.random_range(2..=10);
    (0..n)
        .map(|_| {
            let p = LogPoint::new(rng.random_range(space.log10_c.0..space.log10_c.1), rng.random_range(space.log10_gamma.0..space.log10_gamma.1));
            let loss = 0.2 + 0.1 * (p.log10_c * 0.7).sin() * (p.log10_gamma * 0.5).cos() + rng.random_range(-0.01..0.01);
            Observation { point: p, loss }
        })
        .collect()
}

// ------------------------------------------------------------ quadratic bowl

/// Bowl with its minimum drawn inside the search space, clamped above so the
/// surface flattens out like a saturated error rate.
pub struct Bowl {
    pub center: [f64; 2],
    pub scale: [f64; 2],
}

impl Bowl {
    pub fn seeded(seed: u64, space: &SearchSpace) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb0b1);
        let (c, g) = (space.log10_c, space.log10_gamma);
        Bowl {
            center: [rng.random_range(c.0 + 0.5..c.1 - 0.5), rng.random_range(g.0 + 0.5..g.1 - 0.5)],
            scale: [rng.random_range(0.02..0.08), rng.random_range(0.02..0.08)],
        }
    }

    pub fn loss(&self, p: LogPoint) -> f64 {
        let q = self.scale[0] * (p.log10_c - self.center[0]).powi(2) + self.scale[1] * (p.log10_gamma - self.center[1]).powi(2);
        (0.05 + q).min(0.5)
    }
}

/// Location of the minimum on a 601 x 601 grid, independent of the closed form.
pub fn grid_minimum(bowl: &Bowl, space: &SearchSpace) -> LogPoint {
    let steps = 600;
    let mut best = (f64::INFINITY, LogPoint::new(0.0, 0.0));
    for i in 0..=steps {
        for j in 0..=steps {
            let p = LogPoint::new(
                space.log10_c.0 + (space.log10_c.1 - space.log10_c.0) * i as f64 / steps as f64,
                space.log10_gamma.0 + (space.log10_gamma.1 - space.log10_gamma.0) * j as f64 / steps as f64,
            );
            let l = bowl.loss(p);
            if l < best.0 {
                best = (l, p);
            }
        }
    }
    best.1
}

/// Euclidean distance in log10 units.
pub fn log_distance(a: &LogPoint, b: &LogPoint) -> f64 {
    ((a.log10_c - b.log10_c).powi(2) + (a.log10_gamma - b.log10_gamma).powi(2)).sqrt()
}

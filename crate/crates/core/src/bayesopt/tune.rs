use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{expected_improvement, gp_fit, GpPosterior, LogPoint, Observation, SearchSpace};
use crate::error::{Error, Result};
use crate::featurestore::FeatureMatrix;
use crate::rng::{self, SeededRng};
use crate::svm::{CvProblem, CvSpec, Sign, SvmHyperparams};

pub const DEFAULT_BUDGET: usize = 30;
pub const N_INITIAL: usize = 4;
pub const N_CANDIDATES: usize = 1000;
pub const UCB_KAPPA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneConfig {
    pub space: SearchSpace,
    pub budget: usize,
    pub seed: u64,
    pub cv: CvSpec,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self { space: SearchSpace::default(), budget: DEFAULT_BUDGET, seed: 0, cv: CvSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best_point: LogPoint,
    /// `best_point` in natural units.
    pub best: SvmHyperparams,
    /// `mu + kappa * sigma` at `best_point` under the final GP.
    pub criterion_value: f64,
    pub posterior_mean: f64,
    pub posterior_sd: f64,
    pub history: Vec<Observation>,
    pub space: SearchSpace,
    pub budget: usize,
    pub seed: u64,
}

/// Latin hypercube: each axis is cut into `n` strata, every stratum gets
/// exactly one point.
fn latin_hypercube(space: &SearchSpace, n: usize, rng: &mut SeededRng) -> Vec<LogPoint> {
    let mut axes = Vec::with_capacity(2);
    for (lo, hi) in space.bounds() {
        let mut strata: Vec<usize> = (0..n).collect();
        rng::shuffle(&mut strata, rng);
        let width = (hi - lo) / n as f64;
        axes.push(
            strata
                .into_iter()
                .map(|s| lo + width * (s as f64 + rng.random::<f64>()))
                .collect::<Vec<_>>(),
        );
    }
    (0..n).map(|i| LogPoint::new(axes[0][i], axes[1][i])).collect()
}

fn uniform_point(space: &SearchSpace, rng: &mut SeededRng) -> LogPoint {
    let [(c0, c1), (g0, g1)] = space.bounds();
    LogPoint::new(rng.random_range(c0..=c1), rng.random_range(g0..=g1))
}

fn best_loss(history: &[Observation]) -> f64 {
    history.iter().map(|o| o.loss).fold(f64::INFINITY, f64::min)
}

/// Highest-EI candidate of a fresh seeded pool; the first maximum wins.
fn propose(gp: &GpPosterior, space: &SearchSpace, best: f64, rng: &mut SeededRng) -> LogPoint {
    let mut choice = uniform_point(space, rng);
    let mut choice_ei = expected_improvement(gp, &choice, best);
    for _ in 1..N_CANDIDATES {
        let p = uniform_point(space, rng);
        let ei = expected_improvement(gp, &p, best);
        if ei > choice_ei {
            choice = p;
            choice_ei = ei;
        }
    }
    choice
}

/// Minimizes `objective` over `space` with exactly `budget` evaluations.
/// An objective or GP error aborts the run; the error carries every
/// observation made so far.
pub fn tune_with<F>(space: &SearchSpace, budget: usize, seed: u64, mut objective: F) -> Result<TuneResult>
where
    F: FnMut(LogPoint) -> Result<f64>,
{
    space.validate()?;
    if budget <= N_INITIAL {
        return Err(Error::invalid(format!("tuning budget must be at least {}, got {budget}", N_INITIAL + 1)));
    }
    let mut rng = rng::seeded(seed);
    let mut history: Vec<Observation> = Vec::with_capacity(budget);
    let abort = |history: &Vec<Observation>, e: Error| Error::TuneAborted { history: history.clone(), source: Box::new(e) };

    let mut evaluate = |p: LogPoint, history: &mut Vec<Observation>| -> Result<()> {
        let loss = objective(p).map_err(|e| abort(history, e))?;
        if !loss.is_finite() {
            return Err(abort(history, Error::Numeric(format!("non-finite loss {loss} at {p:?}"))));
        }
        history.push(Observation { point: p, loss });
        Ok(())
    };

    for p in latin_hypercube(space, N_INITIAL, &mut rng) {
        evaluate(p, &mut history)?;
    }
    while history.len() < budget {
        let gp = gp_fit(&history).map_err(|e| abort(&history, e))?;
        let p = propose(&gp, space, best_loss(&history), &mut rng);
        evaluate(p, &mut history)?;
    }

    let gp = gp_fit(&history).map_err(|e| abort(&history, e))?;
    let mut chosen: Option<(LogPoint, f64, f64, f64)> = None;
    for o in &history {
        let (mean, var) = gp.posterior(&o.point);
        let sd = var.sqrt();
        let ucb = mean + UCB_KAPPA * sd;
        if chosen.is_none_or(|c| ucb < c.1) {
            chosen = Some((o.point, ucb, mean, sd));
        }
    }
    let (best_point, criterion_value, posterior_mean, posterior_sd) = chosen.expect("budget > 0");
    Ok(TuneResult {
        best_point,
        best: best_point.hyperparams(),
        criterion_value,
        posterior_mean,
        posterior_sd,
        history,
        space: *space,
        budget,
        seed,
    })
}

/// Tunes an RBF-SVM on `(x, y)` by minimizing stratified k-fold CV loss.
pub fn tune(x: &FeatureMatrix, y: &[Sign], config: &TuneConfig) -> Result<TuneResult> {
    let problem = CvProblem::new(x, y, config.cv)?;
    tune_with(&config.space, config.budget, config.seed, |p| problem.loss(p.hyperparams()))
}

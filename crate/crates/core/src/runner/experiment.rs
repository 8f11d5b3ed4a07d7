use std::borrow::Cow;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::cascade::{PipelineDescriptor, PIPELINE_FILE};
use super::config::{Cutoff, ExperimentConfig, Pipeline};
use super::report::{render_report, ExperimentReport, ReportFormat, StageTiming, TunedPoint};
use super::task::{task_labels, TaskLabels};
use crate::bayesopt::{tune, TuneConfig, TuneResult};
use crate::error::{Error, Result};
use crate::featurestore::{
    balance_downsample, read_fmx, read_labels, read_manifest, split_holdout, write_atomic, write_indices,
    FeatureMatrix, LabelVector, SplitPlan,
};
use crate::metrics::{compute_metrics, confusion, MetricsReport, Split};
use crate::selection::{
    chi_square_scores, rank_features, relieff_scores, write_curve_csv, write_scores_csv, ReductionSummary,
    ReliefParams, ScoreVector, SelectionResult,
};
use crate::svm::{train_standardized, write_svm, CvSpec, SmoConfig, SvmModel};

pub const MODEL_FILE: &str = "model.svm1";

/// Independent seeds for the random stages, derived from the experiment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageSeeds {
    pub balance: u64,
    pub split: u64,
    pub relieff: u64,
    pub folds: u64,
    pub tune: u64,
}

impl StageSeeds {
    pub fn derive(seed: u64) -> Self {
        let at = |k: u64| seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        Self { balance: at(1), split: at(2), relieff: at(3), folds: at(4), tune: at(5) }
    }
}

struct Run<'a> {
    out: &'a Path,
    timings: Vec<StageTiming>,
}

impl Run<'_> {
    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce(&Path) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let r = f(self.out).map_err(|e| e.at_stage(name));
        self.timings.push(StageTiming { stage: name.to_string(), seconds: start.elapsed().as_secs_f64() });
        r
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

struct Loaded {
    x: FeatureMatrix,
    labels: LabelVector,
}

fn load(cfg: &ExperimentConfig) -> Result<Loaded> {
    let manifest = cfg.inputs.manifest.as_ref().map(read_manifest).transpose()?;
    let names = manifest.as_ref().map(|m| m.class_names.clone()).unwrap_or_else(LabelVector::default_taxonomy);
    let x = read_fmx(&cfg.inputs.features)?;
    let x = match manifest.as_ref().and_then(|m| m.origin()) {
        Some(o) => x.with_origin(Some(o)),
        None => x,
    };
    let labels = read_labels(&cfg.inputs.labels, Some(&names))?;
    labels.check_rows(&x)?;
    if let Some(m) = &manifest {
        if !m.image_ids.is_empty() && m.image_ids.len() != x.n_rows() {
            return Err(Error::invalid(format!(
                "manifest lists {} images but the feature file has {} rows",
                m.image_ids.len(),
                x.n_rows()
            )));
        }
    }
    Ok(Loaded { x, labels })
}

fn balance(task: &TaskLabels, labels: &LabelVector, seed: u64) -> Result<Vec<usize>> {
    let eligible = labels.select_rows(&task.rows);
    let picked = balance_downsample(&eligible, seed)?;
    Ok(picked.into_iter().map(|i| task.rows[i]).collect())
}

/// Scores features on the training rows only and applies the cutoff. The
/// retained columns are returned in ascending order.
fn select(
    cfg: &ExperimentConfig,
    x: &FeatureMatrix,
    task: &TaskLabels,
    train: &[usize],
    seed: u64,
    out: &Path,
) -> Result<Option<SelectionResult>> {
    let score = |x_train: &FeatureMatrix, y_train: &LabelVector| -> Result<ScoreVector> {
        match cfg.pipeline {
            Pipeline::ReduceRelieffSvm => relieff_scores(
                x_train,
                y_train,
                ReliefParams {
                    k_neighbors: cfg.selection.k_neighbors,
                    n_sample_rounds: cfg.selection.sample_rounds,
                    seed,
                },
            ),
            Pipeline::ReduceChi2Svm => chi_square_scores(x_train, y_train, cfg.selection.bins),
            Pipeline::SvmDirect => unreachable!(),
        }
    };
    if cfg.pipeline == Pipeline::SvmDirect {
        return Ok(None);
    }
    let scores = score(&x.select_rows(train)?, &task.binary.select_rows(train))?;
    write_scores_csv(&scores, out.join("scores.csv"))?;
    write_curve_csv(&scores, out.join("curve.csv"))?;
    let mut selection = match cfg.selection.cutoff {
        Cutoff::Elbow => SelectionResult::elbow(&scores)?,
        Cutoff::All => SelectionResult::top_k(&rank_features(&scores), scores.len())?,
        Cutoff::Top(k) => SelectionResult::top_k(&rank_features(&scores), k)?,
    };
    selection.selected.sort_unstable();
    write_indices(&selection.selected, out.join("selected.txt"))?;
    Ok(Some(selection))
}

fn evaluate(model: &SvmModel, x: &FeatureMatrix, task: &TaskLabels, plan: &SplitPlan) -> Result<Vec<MetricsReport>> {
    let strata = [&plan.train_idx, &plan.val_idx, &plan.test1_idx, &plan.test2_idx];
    Split::ALL
        .iter()
        .zip(strata)
        .map(|(&split, rows)| {
            let predicted = model.predict_classes(&x.select_rows(rows)?)?;
            let truth = task.binary.select_rows(rows);
            let cm = confusion(truth.labels(), &predicted, task.label_map.positive)?;
            Ok(compute_metrics(&cm)?.with_split(split))
        })
        .collect()
}

/// Runs balance, split, optional feature selection, tuning, training and
/// evaluation, writing every intermediate artifact to `cfg.output_dir`.
/// A failing stage aborts the run; artifacts written so far are kept.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let out = cfg.output_dir.as_path();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let seeds = StageSeeds::derive(cfg.seed);
    let mut run = Run { out, timings: Vec::new() };

    let Loaded { x, labels } = run.stage("load", |_| load(cfg))?;
    let task = run.stage("task", |_| task_labels(cfg.task, &labels))?;
    let balanced = run.stage("balance", |out| {
        let b = balance(&task, &labels, seeds.balance)?;
        write_indices(&b, out.join("balanced.txt"))?;
        Ok(b)
    })?;
    // Strata follow the source classes, so both pneumonia kinds are
    // represented in every split of the merged task.
    let plan = run.stage("split", |out| {
        let plan = split_holdout(&balanced, &labels, seeds.split)?;
        write_json(&plan, &out.join("split.json"))?;
        Ok(plan)
    })?;

    let selection = run.stage("select", |out| select(cfg, &x, &task, &plan.train_idx, seeds.relieff, out))?;
    let x_sel: Cow<FeatureMatrix> = match &selection {
        Some(s) => Cow::Owned(x.select_columns(&s.selected)?),
        None => Cow::Borrowed(&x),
    };
    let selected: Vec<usize> = match &selection {
        Some(s) => s.selected.clone(),
        None => (0..x.n_cols()).collect(),
    };
    let summary = ReductionSummary::new(x.n_cols(), selected.len())?;

    let tuned: TuneResult = run.stage("tune", |out| {
        let x_train = x_sel.select_rows(&plan.train_idx)?;
        let y_train = task.label_map.signs(task.binary.select_rows(&plan.train_idx).labels())?;
        let config = TuneConfig {
            space: cfg.tune.space,
            budget: cfg.tune.budget,
            seed: seeds.tune,
            cv: CvSpec { folds: cfg.tune.folds, seed: seeds.folds },
        };
        let r = tune(&x_train, &y_train, &config)?;
        write_json(&r, &out.join("tune.json"))?;
        Ok(r)
    })?;

    let model = run.stage("train", |out| {
        let m = train_standardized(&x_sel, &task.binary, &plan.train_idx, task.label_map, tuned.best, SmoConfig::default())?;
        write_svm(&m, out.join(MODEL_FILE))?;
        let descriptor = PipelineDescriptor {
            task: cfg.task,
            input_dims: x.n_cols(),
            selected: selected.clone(),
            model: MODEL_FILE.into(),
        };
        write_json(&descriptor, &out.join(PIPELINE_FILE))?;
        Ok(m)
    })?;

    let splits = run.stage("evaluate", |_| evaluate(&model, &x_sel, &task, &plan))?;

    let mut class_counts = BTreeMap::new();
    for (id, rows) in labels.members_of(balanced.iter().copied()) {
        class_counts.insert(labels.class_name(id).unwrap_or("?").to_string(), rows.len());
    }
    let mut report = ExperimentReport {
        name: cfg.name.clone(),
        task: cfg.task,
        pipeline: cfg.pipeline,
        seed: cfg.seed,
        origin: x.origin.clone(),
        class_counts,
        splits,
        selection: summary,
        tuned: TunedPoint {
            c: tuned.best.c,
            gamma: tuned.best.gamma,
            log10_c: tuned.best_point.log10_c,
            log10_gamma: tuned.best_point.log10_gamma,
            criterion_value: tuned.criterion_value,
            evaluations: tuned.history.len(),
        },
        timings: Vec::new(),
    };
    run.stage("write", |out| {
        write_json(&report, &out.join("report.json"))?;
        write_atomic(&out.join("report.csv"), render_report(&report, ReportFormat::Csv).as_bytes())?;
        write_atomic(&out.join("report.txt"), render_report(&report, ReportFormat::Table).as_bytes())
    })?;
    report.timings = run.timings;
    write_json(&report.timings, &out.join("timings.json"))?;
    Ok(report)
}

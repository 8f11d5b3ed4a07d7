use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cxr_core::bayesopt::{tune, SearchSpace, TuneConfig, DEFAULT_BUDGET};
use cxr_core::featurestore::{
    balance_downsample, read_fmx, read_indices, read_labels, read_manifest, split_holdout, write_atomic, write_fmx,
    write_indices, write_labels,
};
use cxr_core::metrics::{compute_metrics, confusion, percent};
use cxr_core::runner::{
    cascade_predict, render_report, run_experiment, CascadeModel, ExperimentConfig, ExperimentReport, ReportFormat,
};
use cxr_core::selection::{
    chi_square_scores, rank_features, read_scores_csv, relieff_scores, write_curve_csv,
    write_scores_csv, ReliefParams, SelectionResult, DEFAULT_BINS, DEFAULT_K_NEIGHBORS,
};
use cxr_core::svm::{read_svm, train_standardized, write_svm, CvSpec, LabelMap, SmoConfig, SvmHyperparams, DEFAULT_FOLDS};
use cxr_core::synthetic::{synth_features, SynthSpec};
use cxr_core::{Error, FeatureMatrix, LabelVector, Result};

#[derive(Parser)]
#[command(name = "cxr", version, about = "Feature selection, SVM training and tuning on CNN feature files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Downsample every class to the smallest class size.
    Balance {
        #[command(flatten)]
        labels: LabelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stratified train/val/test1/test2 split of an index list.
    Split {
        #[command(flatten)]
        labels: LabelArgs,
        /// Rows to split (e.g. the output of `balance`); all rows if omitted.
        #[arg(long)]
        indices: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-feature relevance scores.
    Score {
        #[arg(long, value_enum)]
        method: ScoreKind,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = DEFAULT_K_NEIGHBORS)]
        k_neighbors: usize,
        /// ReliefF rounds; every row once if omitted.
        #[arg(long)]
        sample_rounds: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick features from a scores CSV.
    Select {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, value_enum, default_value_t = SelectKind::Elbow)]
        method: SelectKind,
        /// Number of features for `--method top`.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ranked-score curve as CSV.
    PlotScores {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    #[command(subcommand)]
    Svm(SvmCommand),
    /// Run a configured experiment end to end.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    #[command(subcommand)]
    Cascade(CascadeCommand),
    /// Render a saved report.json.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Generate a labeled Gaussian feature set with planted signal columns.
    Synth {
        /// Rows per class.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        classes: u32,
        /// Comma-separated informative column indices.
        #[arg(long, default_value = "")]
        informative: String,
        /// Mean shift per class step, in noise standard deviations.
        #[arg(long, default_value_t = 5.0)]
        shift: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
}

#[derive(Subcommand)]
enum SvmCommand {
    /// Train an RBF-SVM on standardized features.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        classes: ClassArgs,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Metrics of a trained model on labeled rows.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Also write the metrics as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bayesian search for C and gamma by k-fold CV loss.
    Tune {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        classes: ClassArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_FOLDS)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CascadeCommand {
    /// Normal / viral / bacterial prediction with two trained stages.
    Predict {
        #[arg(long)]
        cascade: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// One class id per row.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct LabelArgs {
    #[arg(long)]
    labels: PathBuf,
    /// Manifest supplying class names.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

impl LabelArgs {
    fn load(&self) -> Result<LabelVector> {
        let names = self.manifest.as_ref().map(read_manifest).transpose()?.map(|m| m.class_names);
        read_labels(&self.labels, names.as_ref())
    }
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    labels: LabelArgs,
    /// Restrict to these rows (one index per line).
    #[arg(long)]
    rows: Option<PathBuf>,
}

struct Data {
    x: FeatureMatrix,
    labels: LabelVector,
    rows: Vec<usize>,
}

impl DataArgs {
    fn load(&self) -> Result<Data> {
        let x = read_fmx(&self.input)?;
        let labels = self.labels.load()?;
        labels.check_rows(&x)?;
        let rows = match &self.rows {
            Some(p) => read_indices(p)?,
            None => (0..x.n_rows()).collect(),
        };
        if let Some(&bad) = rows.iter().find(|&&r| r >= x.n_rows()) {
            return Err(Error::InvalidInput(format!("row {bad} out of range for {} rows", x.n_rows())));
        }
        Ok(Data { x, labels, rows })
    }
}

#[derive(Args)]
struct ClassArgs {
    /// Class id mapped to the negative side (default: smaller id present).
    #[arg(long)]
    negative: Option<u32>,
    /// Class id mapped to the positive side (default: larger id present).
    #[arg(long)]
    positive: Option<u32>,
}

impl ClassArgs {
    fn label_map(&self, labels: &LabelVector, rows: &[usize]) -> Result<LabelMap> {
        let present = classes_present(labels, rows);
        match (self.negative, self.positive) {
            (Some(negative), Some(positive)) if negative != positive => Ok(LabelMap { negative, positive }),
            (None, None) if present.len() == 2 => Ok(LabelMap { negative: present[0], positive: present[1] }),
            _ => Err(Error::InvalidInput(format!(
                "need exactly two classes or distinct --negative/--positive; classes present: {present:?}"
            ))),
        }
    }
}

fn classes_present(labels: &LabelVector, rows: &[usize]) -> Vec<u32> {
    let mut ids: Vec<u32> = rows.iter().map(|&r| labels.labels()[r]).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoreKind {
    Relieff,
    Chi2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectKind {
    Elbow,
    Top,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn read_report(path: &Path) -> Result<ExperimentReport> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Balance { labels, seed, out } => {
            let idx = balance_downsample(&labels.load()?, seed)?;
            write_indices(&idx, &out)?;
            eprintln!("kept {} rows", idx.len());
        }
        Command::Split { labels, indices, seed, out } => {
            let labels = labels.load()?;
            let idx = match indices {
                Some(p) => read_indices(p)?,
                None => (0..labels.len()).collect(),
            };
            let plan = split_holdout(&idx, &labels, seed)?;
            write_json(&plan, &out)?;
            let sizes: Vec<String> = plan.strata().iter().map(|(n, s)| format!("{n}={}", s.len())).collect();
            eprintln!("{}", sizes.join(" "));
        }
        Command::Score { method, data, k_neighbors, sample_rounds, bins, seed, out } => {
            let d = data.load()?;
            let x = d.x.select_rows(&d.rows)?;
            let y = d.labels.select_rows(&d.rows);
            let scores = match method {
                ScoreKind::Relieff => {
                    relieff_scores(&x, &y, ReliefParams { k_neighbors, n_sample_rounds: sample_rounds, seed })?
                }
                ScoreKind::Chi2 => chi_square_scores(&x, &y, bins)?,
            };
            write_scores_csv(&scores, &out)?;
        }
        Command::Select { scores, method, k, out } => {
            let scores = read_scores_csv(scores)?;
            let selection = match (method, k) {
                (SelectKind::Elbow, None) => SelectionResult::elbow(&scores)?,
                (SelectKind::Top, Some(k)) => SelectionResult::top_k(&rank_features(&scores), k)?,
                (SelectKind::Elbow, Some(_)) => return Err(Error::InvalidInput("--k only applies to --method top".into())),
                (SelectKind::Top, None) => return Err(Error::InvalidInput("--method top needs --k".into())),
            };
            write_indices(&selection.selected, &out)?;
            eprintln!("selected {} of {} features", selection.cutoff_k, scores.len());
        }
        Command::PlotScores { scores, out } => write_curve_csv(&read_scores_csv(scores)?, &out)?,
        Command::Svm(SvmCommand::Train { data, classes, c, gamma, out }) => {
            let d = data.load()?;
            let map = classes.label_map(&d.labels, &d.rows)?;
            let params = SvmHyperparams::new(c, gamma)?;
            let model = train_standardized(&d.x, &d.labels, &d.rows, map, params, SmoConfig::default())?;
            write_svm(&model, &out)?;
            eprintln!("{} support vectors, {} iterations", model.n_support(), model.stats.iterations);
        }
        Command::Svm(SvmCommand::Eval { model, data, out }) => {
            let model = read_svm(model)?;
            let d = data.load()?;
            let predicted = model.predict_classes(&d.x.select_rows(&d.rows)?)?;
            let truth = d.labels.select_rows(&d.rows);
            let m = compute_metrics(&confusion(truth.labels(), &predicted, model.label_map.positive)?)?;
            println!(
                "accuracy {}  precision {}  recall {}  f1 {}",
                percent(m.accuracy),
                percent(m.precision),
                percent(m.recall),
                percent(m.f1)
            );
            if let Some(out) = out {
                write_json(&m, &out)?;
            }
        }
        Command::Svm(SvmCommand::Tune { data, classes, budget, folds, seed, out }) => {
            let d = data.load()?;
            let map = classes.label_map(&d.labels, &d.rows)?;
            let x = d.x.select_rows(&d.rows)?;
            let y = map.signs(d.labels.select_rows(&d.rows).labels())?;
            let config = TuneConfig { space: SearchSpace::default(), budget, seed, cv: CvSpec { folds, seed } };
            let r = tune(&x, &y, &config)?;
            write_json(&r, &out)?;
            eprintln!("C = {:.4e}, gamma = {:.4e}, UCB {:.4}", r.best.c, r.best.gamma, r.criterion_value);
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_experiment(&cfg)?;
            print!("{}", render_report(&report, ReportFormat::Table));
        }
        Command::Cascade(CascadeCommand::Predict { cascade, input, out }) => {
            let model = CascadeModel::load(&cascade)?;
            let x = read_fmx(&input)?;
            let result = cascade_predict(&model, &x)?;
            write_labels(&LabelVector::new(result.classes, model.taxonomy.clone())?, &out)?;
            eprintln!("{} rows, {} reached the second stage", x.n_rows(), result.stage2_rows.len());
        }
        Command::Report { report, format } => {
            let format = match format {
                Format::Table => ReportFormat::Table,
                Format::Csv => ReportFormat::Csv,
            };
            print!("{}", render_report(&read_report(&report)?, format));
        }
        Command::Synth { n, d, classes, informative, shift, seed, out, labels } => {
            let informative = informative
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad column index {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let spec = SynthSpec { n_per_class: n, n_classes: classes, d, informative, shift, seed };
            let (x, y) = synth_features(&spec)?;
            write_fmx(&x, &out)?;
            write_labels(&y, &labels)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // every error's message already embeds its cause
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

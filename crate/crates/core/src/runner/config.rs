use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bayesopt::{SearchSpace, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::selection::{DEFAULT_BINS, DEFAULT_K_NEIGHBORS};
use crate::svm::DEFAULT_FOLDS;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Normal against the pneumonia metaclass (viral and bacterial merged).
    NormalVsPneumonia,
    ViralVsBacterial,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::NormalVsPneumonia => "normal_vs_pneumonia",
            Task::ViralVsBacterial => "viral_vs_bacterial",
        }
    }

    /// Names of the negative and positive side.
    pub fn outcome_names(self) -> [&'static str; 2] {
        match self {
            Task::NormalVsPneumonia => ["normal", "pneumonia"],
            Task::ViralVsBacterial => ["bacterial", "viral"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    SvmDirect,
    ReduceRelieffSvm,
    ReduceChi2Svm,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::SvmDirect => "svm_direct",
            Pipeline::ReduceRelieffSvm => "reduce_relieff_svm",
            Pipeline::ReduceChi2Svm => "reduce_chi2_svm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub features: PathBuf,
    pub labels: PathBuf,
    #[serde(default)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneSettings {
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub space: SearchSpace,
}

impl Default for TuneSettings {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, folds: DEFAULT_FOLDS, space: SearchSpace::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Elbow,
    /// Keep every feature (the scores are still computed and exported).
    All,
    /// Keep the `n` best-ranked features.
    Top(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionSettings {
    #[serde(default = "default_k")]
    pub k_neighbors: usize,
    /// ReliefF sampling rounds; `None` visits every training row once.
    #[serde(default)]
    pub sample_rounds: Option<usize>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff: Cutoff,
}

impl Default for SelectionSettings {
    fn default() -> Self {
        Self { k_neighbors: DEFAULT_K_NEIGHBORS, sample_rounds: None, bins: DEFAULT_BINS, cutoff: Cutoff::Elbow }
    }
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}
fn default_folds() -> usize {
    DEFAULT_FOLDS
}
fn default_k() -> usize {
    DEFAULT_K_NEIGHBORS
}
fn default_bins() -> usize {
    DEFAULT_BINS
}
fn default_cutoff() -> Cutoff {
    Cutoff::Elbow
}

/// Experiment description read from JSON. Relative paths are resolved
/// against the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    pub task: Task,
    pub pipeline: Pipeline,
    pub inputs: Inputs,
    pub seed: u64,
    #[serde(default)]
    pub tune: TuneSettings,
    #[serde(default)]
    pub selection: SelectionSettings,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::invalid(format!("experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config and resolves its paths relative to the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::invalid(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new("")));
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.inputs.features);
        fix(&mut self.inputs.labels);
        if let Some(m) = self.inputs.manifest.as_mut() {
            fix(m);
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.name.trim().is_empty() {
            return Err(Error::invalid("experiment name is empty"));
        }
        self.tune.space.validate()?;
        if self.tune.budget < 5 {
            return Err(Error::invalid(format!("tune budget must be at least 5, got {}", self.tune.budget)));
        }
        if self.tune.folds < 2 {
            return Err(Error::invalid("tune folds must be at least 2"));
        }
        if self.selection.k_neighbors == 0 || self.selection.bins < 2 {
            return Err(Error::invalid("selection needs k_neighbors >= 1 and bins >= 2"));
        }
        if matches!(self.selection.cutoff, Cutoff::Top(0)) || self.selection.sample_rounds == Some(0) {
            return Err(Error::invalid("selection cutoff and sample_rounds must be positive"));
        }
        Ok(())
    }
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::Task;
use crate::error::{Error, Result};
use crate::featurestore::{FeatureMatrix, LabelVector};
use crate::svm::{read_svm, SvmModel};

pub const PIPELINE_FILE: &str = "pipeline.json";

/// Everything needed to apply a trained experiment to new feature rows:
/// the retained input columns and the model (which carries its own
/// standardizer).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineDescriptor {
    pub task: Task,
    pub input_dims: usize,
    /// Input columns fed to the model, in order.
    pub selected: Vec<usize>,
    /// Model file, relative to the descriptor.
    pub model: PathBuf,
}

/// A descriptor with its model loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline {
    pub descriptor: PipelineDescriptor,
    pub model: SvmModel,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

fn relative_to(base: &Path, p: &Path) -> PathBuf {
    if p.is_relative() { base.join(p) } else { p.to_path_buf() }
}

impl TrainedPipeline {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let descriptor: PipelineDescriptor = read_json(path)?;
        let model = read_svm(relative_to(path.parent().unwrap_or(Path::new("")), &descriptor.model))?;
        if model.n_features() != descriptor.selected.len() {
            return Err(Error::invalid(format!(
                "{}: model expects {} features but {} columns are selected",
                path.display(),
                model.n_features(),
                descriptor.selected.len()
            )));
        }
        Ok(Self { descriptor, model })
    }

    /// Binary outcome (0 negative, 1 positive) for every row.
    pub fn predict(&self, features: &FeatureMatrix) -> Result<Vec<u32>> {
        if features.n_cols() != self.descriptor.input_dims {
            return Err(Error::invalid(format!(
                "{} stage expects {} input features, got {}",
                self.descriptor.task.as_str(),
                self.descriptor.input_dims,
                features.n_cols()
            )));
        }
        let x = features.select_columns(&self.descriptor.selected)?;
        Ok(self.model.predict(&x)?.into_iter().map(|s| u32::from(s > 0)).collect())
    }
}

/// Paths of the two stage descriptors, relative to the cascade file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeSpec {
    pub stage1: PathBuf,
    pub stage2: PathBuf,
}

/// Normal vs pneumonia first; rows called pneumonia go on to viral vs
/// bacterial. Each stage applies its own column selection and scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeModel {
    pub stage1: TrainedPipeline,
    pub stage2: TrainedPipeline,
    /// Output ids, by class name.
    pub taxonomy: BTreeMap<u32, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeOutput {
    pub classes: Vec<u32>,
    /// Rows that reached the second stage.
    pub stage2_rows: Vec<usize>,
}

impl CascadeModel {
    pub fn new(stage1: TrainedPipeline, stage2: TrainedPipeline, taxonomy: BTreeMap<u32, String>) -> Result<Self> {
        if stage1.descriptor.task != Task::NormalVsPneumonia || stage2.descriptor.task != Task::ViralVsBacterial {
            return Err(Error::invalid(
                "cascade needs a normal_vs_pneumonia first stage and a viral_vs_bacterial second stage",
            ));
        }
        let names = LabelVector::new(vec![], taxonomy.clone())?;
        for name in ["normal", "bacterial", "viral"] {
            if names.class_id(name).is_none() {
                return Err(Error::invalid(format!("cascade taxonomy lacks class {name:?}")));
            }
        }
        Ok(Self { stage1, stage2, taxonomy })
    }

    /// Reads a cascade file; output ids follow the default taxonomy.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let spec: CascadeSpec = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::new(
            TrainedPipeline::load(relative_to(base, &spec.stage1))?,
            TrainedPipeline::load(relative_to(base, &spec.stage2))?,
            LabelVector::default_taxonomy(),
        )
    }

    fn id(&self, name: &str) -> u32 {
        *self.taxonomy.iter().find(|(_, n)| n.eq_ignore_ascii_case(name)).expect("checked in new").0
    }
}

pub fn cascade_predict(cascade: &CascadeModel, features: &FeatureMatrix) -> Result<CascadeOutput> {
    let first = cascade.stage1.predict(features)?;
    let normal = cascade.id("normal");
    let mut classes = vec![normal; features.n_rows()];
    let stage2_rows: Vec<usize> = (0..first.len()).filter(|&i| first[i] == 1).collect();
    if !stage2_rows.is_empty() {
        let second = cascade.stage2.predict(&features.select_rows(&stage2_rows)?)?;
        let (bacterial, viral) = (cascade.id("bacterial"), cascade.id("viral"));
        for (&row, &out) in stage2_rows.iter().zip(&second) {
            classes[row] = if out == 1 { viral } else { bacterial };
        }
    }
    Ok(CascadeOutput { classes, stage2_rows })
}

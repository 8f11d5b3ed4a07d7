use std::path::{Path, PathBuf};

use cxr_core::featurestore::{write_fmx, write_labels};
use cxr_core::runner::{Cutoff, ExperimentConfig, Inputs, Pipeline, SelectionSettings, Task, TuneSettings, SCHEMA_VERSION};
use cxr_core::synthetic::{synth_features, SynthSpec};
use cxr_core::{FeatureMatrix, LabelVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Writes `x.fmx`, `y.txt` and `manifest.json` into `dir`.
pub fn write_dataset(dir: &Path, x: &FeatureMatrix, y: &LabelVector) -> Inputs {
    let features = dir.join("x.fmx");
    let labels = dir.join("y.txt");
    let manifest = dir.join("manifest.json");
    write_fmx(x, &features).unwrap();
    write_labels(y, &labels).unwrap();
    let names: serde_json::Map<String, serde_json::Value> =
        y.class_names().iter().map(|(k, v)| (k.to_string(), v.clone().into())).collect();
    let m = serde_json::json!({"dataset_name": "synthetic", "class_names": names});
    std::fs::write(&manifest, m.to_string()).unwrap();
    Inputs { features, labels, manifest: Some(manifest) }
}

/// Two-class labels named normal / bacterial so that both tasks' name
/// lookups work for the normal vs pneumonia task.
pub fn as_normal_vs_bacterial(y: &LabelVector) -> LabelVector {
    let names = [(0, "normal".to_string()), (1, "bacterial".to_string())].into_iter().collect();
    LabelVector::new(y.labels().to_vec(), names).unwrap()
}

/// 5 planted columns out of 1000 at a 5 sigma mean shift.
pub fn planted_spec(seed: u64) -> SynthSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x91a7);
    let columns: Vec<usize> = (0..1000).collect();
    let mut informative = cxr_core::rng::sample_without_replacement(&columns, 5, &mut rng);
    informative.sort_unstable();
    SynthSpec { n_per_class: 100, n_classes: 2, d: 1000, informative, shift: 5.0, seed }
}

/// Two blobs whose means are 5 noise standard deviations apart.
pub fn blob_spec(seed: u64) -> SynthSpec {
    let d = 50;
    SynthSpec { n_per_class: 100, n_classes: 2, d, informative: (0..d).collect(), shift: 5.0 / (d as f64).sqrt(), seed }
}

pub fn experiment(dir: &Path, spec: &SynthSpec, task: Task, pipeline: Pipeline, cutoff: Cutoff) -> ExperimentConfig {
    let (x, y) = synth_features(spec).unwrap();
    let y = if spec.n_classes == 2 { as_normal_vs_bacterial(&y) } else { y };
    let inputs = write_dataset(dir, &x, &y);
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name: format!("synthetic-{}", spec.seed),
        task,
        pipeline,
        inputs,
        seed: spec.seed,
        tune: TuneSettings::default(),
        selection: SelectionSettings { cutoff, ..SelectionSettings::default() },
        output_dir: dir.join("out"),
    }
}

pub fn write_config(cfg: &ExperimentConfig, path: &Path) -> PathBuf {
    std::fs::write(path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_path_buf()
}

//! Config-driven experiments, two-stage cascade prediction and report
//! rendering.

mod cascade;
mod config;
mod experiment;
mod report;
mod task;

pub use cascade::{
    cascade_predict, CascadeModel, CascadeOutput, CascadeSpec, PipelineDescriptor, TrainedPipeline, PIPELINE_FILE,
};
pub use config::{Cutoff, ExperimentConfig, Inputs, Pipeline, SelectionSettings, Task, TuneSettings, SCHEMA_VERSION};
pub use experiment::{run_experiment, StageSeeds, MODEL_FILE};
pub use report::{render_report, ExperimentReport, ReportFormat, StageTiming, TunedPoint};
pub use task::{task_labels, TaskLabels, EXCLUDED};

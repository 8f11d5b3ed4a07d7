use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::{Pipeline, Task};
use crate::featurestore::FeatureOrigin;
use crate::metrics::{percent, MetricsReport};
use crate::selection::ReductionSummary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedPoint {
    pub c: f64,
    pub gamma: f64,
    pub log10_c: f64,
    pub log10_gamma: f64,
    /// Upper confidence bound of the CV loss at the chosen point.
    pub criterion_value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Outcome of one experiment. Wall-clock timings are kept out of the JSON
/// form so that reruns produce identical bytes; they go to `timings.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub task: Task,
    pub pipeline: Pipeline,
    pub seed: u64,
    #[serde(default)]
    pub origin: Option<FeatureOrigin>,
    /// Rows per source class after balancing.
    pub class_counts: BTreeMap<String, usize>,
    /// Training, validation, test1, test2, in that order.
    pub splits: Vec<MetricsReport>,
    pub selection: ReductionSummary,
    pub tuned: TunedPoint,
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Table,
}

const COLUMNS: [&str; 6] = ["split", "samples", "accuracy", "precision", "recall", "f1"];

fn cells(m: &MetricsReport) -> [String; 6] {
    [
        m.split.map(|s| s.as_str()).unwrap_or("-").to_string(),
        m.confusion.total().to_string(),
        percent(m.accuracy),
        percent(m.precision),
        percent(m.recall),
        percent(m.f1),
    ]
}

/// One row per split with percentages to 2 decimals. The table form adds
/// a header naming the experiment and a footer with the selection summary
/// and the tuned hyperparameters.
pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(&COLUMNS.join(","));
            out.push('\n');
            for m in &report.splits {
                out.push_str(&cells(m).join(","));
                out.push('\n');
            }
        }
        ReportFormat::Table => {
            let rows: Vec<[String; 6]> = report.splits.iter().map(cells).collect();
            let widths: Vec<usize> = (0..COLUMNS.len())
                .map(|c| rows.iter().map(|r| r[c].len()).chain([COLUMNS[c].len()]).max().unwrap_or(0))
                .collect();
            let line = |out: &mut String, row: &[&str]| {
                let mut text = String::new();
                for (c, cell) in row.iter().enumerate() {
                    if c == 0 {
                        let _ = write!(text, "{cell:<w$}", w = widths[c]);
                    } else {
                        let _ = write!(text, "  {cell:>w$}", w = widths[c]);
                    }
                }
                out.push_str(text.trim_end());
                out.push('\n');
            };
            let _ = writeln!(out, "{} ({}, {}, seed {})", report.name, report.task.as_str(), report.pipeline.as_str(), report.seed);
            line(&mut out, &COLUMNS);
            for r in &rows {
                line(&mut out, &r.iter().map(String::as_str).collect::<Vec<_>>());
            }
            let s = &report.selection;
            let _ = writeln!(
                out,
                "features: {} of {} retained ({} reduction)",
                s.retained_dims,
                s.initial_dims,
                s.percent()
            );
            let t = &report.tuned;
            let _ = writeln!(
                out,
                "C = {:.4e}, gamma = {:.4e} (UCB {:.4}, {} evaluations)",
                t.c, t.gamma, t.criterion_value, t.evaluations
            );
        }
    }
    out
}

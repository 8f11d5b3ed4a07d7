use std::collections::BTreeMap;
use std::path::Path;

use cxr_core::metrics::{compute_metrics, ConfusionMatrix, Split};
use cxr_core::runner::{render_report, ExperimentReport, Pipeline, ReportFormat, Task, TunedPoint};
use cxr_core::selection::ReductionSummary;

fn fixed_report() -> ExperimentReport {
    let counts = [(Split::Training, (1290, 40, 60, 1310)), (Split::Validation, (420, 30, 30, 420)), (Split::Test1, (432, 10, 18, 440)), (Split::Test2, (150, 0, 0, 150))];
    let splits = counts
        .iter()
        .map(|&(s, (tp, fp, fn_, tn))| {
            compute_metrics(&ConfusionMatrix { tp, fp, fn_, tn, positive_class: 1 }).unwrap().with_split(s)
        })
        .collect();
    ExperimentReport {
        name: "golden".into(),
        task: Task::NormalVsPneumonia,
        pipeline: Pipeline::ReduceRelieffSvm,
        seed: 17,
        origin: None,
        class_counts: BTreeMap::from([("normal".into(), 1500), ("pneumonia".into(), 1500)]),
        splits,
        selection: ReductionSummary::new(100_000, 6_000).unwrap(),
        tuned: TunedPoint { c: 12.5, gamma: 3.2e-4, log10_c: 12.5f64.log10(), log10_gamma: 3.2e-4f64.log10(), criterion_value: 0.0712, evaluations: 30 },
        timings: Vec::new(),
    }
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "{name} differs from the golden copy");
}

#[test]
fn table_matches_golden() {
    golden("report.txt", &render_report(&fixed_report(), ReportFormat::Table));
}

#[test]
fn csv_matches_golden() {
    golden("report.csv", &render_report(&fixed_report(), ReportFormat::Csv));
}

#[test]
fn csv_reparses_to_the_same_numbers() {
    let report = fixed_report();
    let text = render_report(&report, ReportFormat::Csv);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["split", "samples", "accuracy", "precision", "recall", "f1"]);
    let pct = |s: &str| s.strip_suffix('%').unwrap().parse::<f64>().unwrap() / 100.0;
    for (rec, m) in r.records().zip(&report.splits) {
        let rec = rec.unwrap();
        assert_eq!(&rec[0], m.split.unwrap().as_str());
        assert_eq!(rec[1].parse::<u64>().unwrap(), m.confusion.total());
        for (cell, v) in rec.iter().skip(2).zip([m.accuracy, m.precision, m.recall, m.f1]) {
            assert!((pct(cell) - v).abs() <= 0.5e-4, "{cell} vs {v}");
        }
    }
}

#[test]
fn perfect_metrics_render_as_hundred_percent() {
    let text = render_report(&fixed_report(), ReportFormat::Table);
    let test2 = text.lines().find(|l| l.starts_with("test2")).unwrap();
    assert_eq!(test2.matches("100.00%").count(), 4);
}

#[test]
fn json_roundtrip_keeps_everything_but_timings() {
    let mut report = fixed_report();
    report.timings.push(cxr_core::runner::StageTiming { stage: "tune".into(), seconds: 1.5 });
    let back: ExperimentReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    report.timings.clear();
    assert_eq!(back, report);
}

//! Evaluation reports in plain-text and JSON form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::PopularityClass;
use crate::learn::LearnerParams;

use super::metrics::ClassMetrics;

/// Everything one evaluation run produced. The JSON field order below is
/// the wire schema; `warnings` is display-only and stays out of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub learner: String,
    pub k: usize,
    pub seed: u64,
    pub params: LearnerParams,
    pub labels: [String; 4],
    pub matrix: [[u64; 4]; 4],
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub accuracy: f64,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Plain,
    Json,
}

pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Plain => render_plain(report),
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report).expect("report serializes");
            text.push('\n');
            text
        }
    }
}

fn render_plain(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("learner: {}\n", report.learner));
    out.push_str(&format!("folds: {}\n", report.k));
    out.push_str(&format!("seed: {}\n", report.seed));
    out.push_str(&format!(
        "params: min_leaf={} prune_fraction={} use_gain_ratio={}\n",
        report.params.min_leaf, report.params.prune_fraction, report.params.use_gain_ratio
    ));
    for warning in &report.warnings {
        out.push_str(&format!("warning: {warning}\n"));
    }

    out.push('\n');
    out.push_str(&format!(
        "{:<10}  {:>7}  {:>7}  {:>9}  {:>6}\n",
        "class", "tp_rate", "fp_rate", "precision", "recall"
    ));
    for label in PopularityClass::ALL {
        let m = report
            .per_class
            .get(label.label())
            .copied()
            .unwrap_or_default();
        out.push_str(&format!(
            "{:<10}  {:>7.3}  {:>7.3}  {:>9.3}  {:>6.3}\n",
            label.label(),
            m.tp_rate,
            m.fp_rate,
            m.precision,
            m.recall
        ));
    }

    out.push('\n');
    out.push_str("confusion matrix (rows actual, columns predicted):\n");
    out.push_str(&format!("{:<10}", ""));
    for label in &report.labels {
        out.push_str(&format!("  {label:>9}"));
    }
    out.push_str(&format!("  {:>9}\n", "total"));
    for (r, label) in report.labels.iter().enumerate() {
        out.push_str(&format!("{label:<10}"));
        for cell in report.matrix[r] {
            out.push_str(&format!("  {cell:>9}"));
        }
        let row_total: u64 = report.matrix[r].iter().sum();
        out.push_str(&format!("  {row_total:>9}\n"));
    }

    let trace: u64 = (0..4).map(|i| report.matrix[i][i]).sum();
    let total: u64 = report.matrix.iter().flatten().sum();
    out.push('\n');
    out.push_str(&format!(
        "accuracy: {:.4}% ({trace}/{total})\n",
        report.accuracy * 100.0
    ));
    out
}

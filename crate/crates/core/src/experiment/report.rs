use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::evaluate::{ConfusionMatrix, Metrics, PhaseTiming};
use crate::feature_select::SelectedFeatures;
use crate::flow_data::SynthesisSpec;
use crate::fsutil::{read_json, write_atomic, write_json_atomic};
use crate::neuralnet::{ModelKind, TrainingHistory};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    File { path: String },
    Synthetic { spec: SynthesisSpec },
    InMemory,
}

/// Row counts through the pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub source: DataSource,
    pub rows: usize,
    pub attack_rows: usize,
    pub benign_rows: usize,
    /// Numeric features left after the drop stage.
    pub feature_count: usize,
    pub dropped_columns: Vec<String>,
    pub smote_input_rows: usize,
    pub smote_output_rows: usize,
    pub smote_synthetic_rows: usize,
    pub smote_k_used: usize,
    pub train_rows: usize,
    pub train_attack_rows: usize,
    pub train_benign_rows: usize,
    pub test_rows: usize,
    pub test_attack_rows: usize,
    pub test_benign_rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    /// Preset name, or `custom` when any setting departs from it.
    pub name: String,
    pub config: ExperimentConfig,
    pub classifier: ModelKind,
    pub dataset: DatasetSummary,
    pub selection: SelectedFeatures,
    pub feature_count: usize,
    /// Split the headline metrics were computed on.
    pub evaluation_split: String,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    /// Accuracy on the resampled, scaled training rows.
    pub train_accuracy: f64,
    pub history: TrainingHistory,
    pub timings: Vec<PhaseTiming>,
    pub model_path: Option<String>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    /// The report with every wall-clock field set to zero.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.metrics.train_seconds = 0.0;
        r.metrics.mean_epoch_seconds = 0.0;
        for e in &mut r.history.epochs {
            e.seconds = 0.0;
        }
        for t in &mut r.timings {
            t.seconds = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON of [`Self::without_timings`]; equal across reruns with the
    /// same seed and data.
    pub fn canonical_json(&self) -> Result<String> {
        self.without_timings().to_json()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json_atomic(path.as_ref(), self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_json(path.as_ref())
    }
}

/// Scores of a stored model on a supplied dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub format_version: u32,
    pub classifier: ModelKind,
    pub input_features: Vec<String>,
    pub model_path: Option<String>,
    pub data: DataSource,
    pub rows: usize,
    pub evaluation_split: String,
    pub threshold: f64,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    pub notes: Vec<String>,
}

impl EvaluationReport {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json_atomic(path.as_ref(), self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub accuracy: f64,
    pub train_seconds: f64,
    pub feature_count: usize,
    pub classifier: String,
    pub selector: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

/// One row per report, ordered by name (stable for equal names).
pub fn compare(reports: &[ExperimentReport]) -> Result<ComparisonTable> {
    if reports.is_empty() {
        return Err(Error::Empty);
    }
    let mut rows: Vec<ComparisonRow> = reports
        .iter()
        .map(|r| ComparisonRow {
            name: r.name.clone(),
            accuracy: r.metrics.accuracy,
            train_seconds: r.metrics.train_seconds,
            feature_count: r.feature_count,
            classifier: r.classifier.label().to_string(),
            selector: r.selection.method.label().to_string(),
        })
        .collect();
    rows.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(ComparisonTable { rows })
}

impl ComparisonTable {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json_atomic(path.as_ref(), self)
    }

    pub fn save_markdown(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.to_markdown().as_bytes())
    }

    /// Pipe table with padded columns. Accuracy is shown in percent.
    pub fn to_markdown(&self) -> String {
        let header = [
            "Model",
            "Accuracy (%)",
            "Training Time (s)",
            "Features",
            "Classifier",
            "Feature Selector",
        ];
        let cells: Vec<[String; 6]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    format!("{:.2}", r.accuracy * 100.0),
                    format!("{:.2}", r.train_seconds),
                    r.feature_count.to_string(),
                    r.classifier.clone(),
                    r.selector.clone(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |values: Vec<&str>| {
            let padded: Vec<String> = values
                .iter()
                .zip(widths)
                .map(|(v, w)| format!("{v:<w$}"))
                .collect();
            format!("| {} |\n", padded.join(" | "))
        };
        let mut out = line(header.to_vec());
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
        for row in &cells {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
        }
        out
    }
}

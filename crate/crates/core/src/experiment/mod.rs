//! Named pipeline presets, the end-to-end runner, and run reports.

mod config;
mod report;
mod runner;

pub use config::{ExperimentConfig, Preset, Selector, CUSTOM_NAME, LSTM_HIDDEN, MLP_HIDDEN};
pub use report::{
    compare, ComparisonRow, ComparisonTable, DataSource, DatasetSummary, EvaluationReport,
    ExperimentReport, REPORT_FORMAT_VERSION,
};
pub use runner::{evaluate_model, run_experiment, ExperimentRun};

//! Flow-record DDoS detection toolkit.
//!
//! The pipeline ingests flow records (BoT-IoT CSV layout or a seeded
//! synthetic surrogate), rebalances the training split with SMOTE,
//! standardizes features, selects a feature subset with a Pearson
//! redundancy filter or mutual-information ranking, and trains a small
//! MLP or LSTM binary classifier. Everything downstream of the seed is
//! deterministic.

pub mod error;
pub mod evaluate;
pub mod experiment;
pub mod feature_select;
pub mod flow_data;
pub mod neuralnet;
pub mod preprocess;

mod fsutil;

pub use error::{Error, Result};
pub use flow_data::{ColumnDescriptor, ColumnKind, FlowDataset};

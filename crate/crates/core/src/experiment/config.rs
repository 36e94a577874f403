use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_select::{
    correlation_filter, mi_rank_select, SelectedFeatures, SelectionMethod,
};
use crate::flow_data::{FlowDataset, DEFAULT_DROP_COLUMNS};
use crate::neuralnet::{ModelKind, TrainingConfig};
use crate::preprocess::SmoteConfig;

pub const CUSTOM_NAME: &str = "custom";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "BASE")]
    Base,
    #[serde(rename = "FS1")]
    Fs1,
    #[serde(rename = "FS2")]
    Fs2,
    #[serde(rename = "FS3")]
    Fs3,
    #[serde(rename = "FS4")]
    Fs4,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Base, Preset::Fs1, Preset::Fs2, Preset::Fs3, Preset::Fs4];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Base => "BASE",
            Preset::Fs1 => "FS1",
            Preset::Fs2 => "FS2",
            Preset::Fs3 => "FS3",
            Preset::Fs4 => "FS4",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "");
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown preset {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Selector {
    None,
    Correlation { threshold: f64 },
    MutualInformation { k: usize },
}

impl Selector {
    pub fn method(self) -> SelectionMethod {
        match self {
            Selector::None => SelectionMethod::None,
            Selector::Correlation { .. } => SelectionMethod::Correlation,
            Selector::MutualInformation { .. } => SelectionMethod::MutualInformation,
        }
    }

    pub fn apply(self, ds: &FlowDataset) -> Result<SelectedFeatures> {
        match self {
            Selector::None => Ok(SelectedFeatures::all(ds.feature_names())),
            Selector::Correlation { threshold } => correlation_filter(ds, threshold),
            Selector::MutualInformation { k } => mi_rank_select(ds, k),
        }
    }
}

/// One pipeline run: preprocessing switches, selector, classifier and
/// optimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Preset name or `custom`.
    pub name: String,
    pub selector: Selector,
    pub classifier: ModelKind,
    pub hidden_layers: Vec<usize>,
    pub training: TrainingConfig,
    pub smote: SmoteConfig,
    /// Test fraction of the stratified split.
    pub split: f64,
    /// Drives the split and weight initialization.
    pub seed: u64,
    /// Dropped when present; absent names are skipped.
    pub drop_columns: Vec<String>,
    pub drop_string_columns: bool,
    pub smote_before_split: bool,
    pub select_before_smote: bool,
    pub smote_on_scaled: bool,
}

pub const MLP_HIDDEN: [usize; 2] = [6, 6];
pub const LSTM_HIDDEN: [usize; 2] = [64, 128];

impl ExperimentConfig {
    pub fn preset(preset: Preset, seed: u64) -> Self {
        let (selector, classifier, batch_size, epochs) = match preset {
            Preset::Base => (Selector::None, ModelKind::Mlp, 20, 10),
            Preset::Fs1 => (Selector::Correlation { threshold: 0.65 }, ModelKind::Mlp, 20, 20),
            Preset::Fs2 => (Selector::MutualInformation { k: 11 }, ModelKind::Mlp, 20, 20),
            Preset::Fs3 => (Selector::Correlation { threshold: 0.65 }, ModelKind::Lstm, 32, 50),
            Preset::Fs4 => (Selector::MutualInformation { k: 11 }, ModelKind::Lstm, 32, 50),
        };
        let hidden_layers = match classifier {
            ModelKind::Mlp => MLP_HIDDEN.to_vec(),
            ModelKind::Lstm => LSTM_HIDDEN.to_vec(),
        };
        ExperimentConfig {
            name: preset.name().to_string(),
            selector,
            classifier,
            hidden_layers,
            training: TrainingConfig {
                epochs,
                batch_size,
                seed,
                ..TrainingConfig::default()
            },
            smote: SmoteConfig {
                seed,
                ..SmoteConfig::default()
            },
            split: 0.2,
            seed,
            drop_columns: DEFAULT_DROP_COLUMNS.iter().map(|s| s.to_string()).collect(),
            drop_string_columns: true,
            smote_before_split: false,
            select_before_smote: false,
            smote_on_scaled: false,
        }
    }

    /// The preset named in `name`, if any.
    pub fn requested_preset(&self) -> Option<Preset> {
        self.name.parse().ok()
    }

    /// `name` when every field still matches that preset at this seed,
    /// `custom` otherwise.
    pub fn effective_name(&self) -> String {
        match self.requested_preset() {
            Some(p) if *self == ExperimentConfig::preset(p, self.seed) => p.name().to_string(),
            _ => CUSTOM_NAME.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.training.validate()?;
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::InvalidConfig(format!("split {} not in (0, 1)", self.split)));
        }
        if self.hidden_layers.is_empty() || self.hidden_layers.contains(&0) {
            return Err(Error::InvalidConfig("hidden layer widths must be positive".into()));
        }
        if self.smote.k_neighbors == 0 {
            return Err(Error::InvalidConfig("SMOTE k must be at least 1".into()));
        }
        match self.selector {
            Selector::Correlation { threshold } if !(threshold > 0.0 && threshold < 1.0) => Err(
                Error::InvalidConfig(format!("correlation threshold {threshold} not in (0, 1)")),
            ),
            Selector::MutualInformation { k: 0 } => {
                Err(Error::InvalidConfig("mutual information k must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Free-text caveats carried into the report.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = vec![
            "precision, recall and f1 are 0 when their denominator is 0".to_string(),
            "accuracy, precision, recall and f1 are measured on the held-out test split".to_string(),
        ];
        if self.requested_preset() == Some(Preset::Base) {
            notes.push("BASE trains for 10 epochs at batch size 20 (interpreted setting)".to_string());
        }
        notes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_frozen() {
        let fs2 = ExperimentConfig::preset(Preset::Fs2, 7);
        assert_eq!(fs2.selector, Selector::MutualInformation { k: 11 });
        assert_eq!(fs2.classifier, ModelKind::Mlp);
        assert_eq!((fs2.training.batch_size, fs2.training.epochs), (20, 20));
        let fs3 = ExperimentConfig::preset(Preset::Fs3, 7);
        assert_eq!(fs3.selector, Selector::Correlation { threshold: 0.65 });
        assert_eq!((fs3.training.batch_size, fs3.training.epochs), (32, 50));
        assert_eq!(fs3.hidden_layers, vec![64, 128]);
        let base = ExperimentConfig::preset(Preset::Base, 7);
        assert_eq!((base.training.batch_size, base.training.epochs), (20, 10));
        assert_eq!(base.selector, Selector::None);
        for p in Preset::ALL {
            assert_eq!(ExperimentConfig::preset(p, 3).effective_name(), p.name());
        }
    }

    #[test]
    fn override_becomes_custom() {
        let mut cfg = ExperimentConfig::preset(Preset::Fs1, 1);
        cfg.training.epochs = 3;
        assert_eq!(cfg.effective_name(), CUSTOM_NAME);
        let mut cfg = ExperimentConfig::preset(Preset::Fs4, 1);
        cfg.smote_before_split = true;
        assert_eq!(cfg.effective_name(), CUSTOM_NAME);
    }

    #[test]
    fn preset_names_parse() {
        assert_eq!("fs-2".parse::<Preset>().unwrap(), Preset::Fs2);
        assert_eq!("BASE".parse::<Preset>().unwrap(), Preset::Base);
        assert!("FS9".parse::<Preset>().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ExperimentConfig::preset(Preset::Fs4, 99);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::preset(Preset::Fs1, 0);
        cfg.split = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::preset(Preset::Fs2, 0);
        cfg.selector = Selector::MutualInformation { k: 0 };
        assert!(cfg.validate().is_err());
    }
}

//! Filter-method feature selection.
//!
//! Two selectors are provided: a Pearson redundancy filter that drops the
//! later member of every strongly correlated pair, and a mutual-information
//! ranking that keeps the `k` features most informative about the label.

mod correlation;
mod mutual_info;

use serde::{Deserialize, Serialize};

pub use correlation::{correlation_filter, correlation_matrix, pearson_r, CorrelationMatrix};
pub use mutual_info::{
    default_bins, equal_frequency_bins, mi_rank_select, mutual_information,
    mutual_information_codes, DEFAULT_MAX_BINS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    /// Every feature kept.
    None,
    Correlation,
    MutualInformation,
}

impl SelectionMethod {
    pub fn label(self) -> &'static str {
        match self {
            SelectionMethod::None => "none",
            SelectionMethod::Correlation => "correlation coefficient",
            SelectionMethod::MutualInformation => "mutual information",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub name: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DroppedFeature {
    pub name: String,
    /// `|r|` to `partner` for the correlation filter, MI in nats otherwise.
    pub score: f64,
    /// The kept feature whose correlation caused the drop.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
}

/// Outcome of a selector: the retained columns in input order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeatures {
    pub method: SelectionMethod,
    /// Correlation threshold or `k`, depending on `method`.
    pub threshold_or_k: f64,
    pub kept: Vec<String>,
    /// Aligned with `kept`. For the correlation filter this is the largest
    /// `|r|` to a feature it caused to be dropped (0 when none).
    pub scores: Vec<f64>,
    pub dropped: Vec<DroppedFeature>,
    /// Every feature by descending MI; empty for the correlation filter.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ranking: Vec<FeatureScore>,
}

impl SelectedFeatures {
    /// Pass-through selection keeping every column.
    pub fn all(names: Vec<String>) -> Self {
        let scores = vec![0.0; names.len()];
        SelectedFeatures {
            method: SelectionMethod::None,
            threshold_or_k: names.len() as f64,
            kept: names,
            scores,
            dropped: Vec::new(),
            ranking: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn dropped_names(&self) -> Vec<&str> {
        self.dropped.iter().map(|d| d.name.as_str()).collect()
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> crate::Result<()> {
        crate::fsutil::write_json_atomic(path.as_ref(), self)
    }
}

//! Flow-record datasets: ingestion, column pruning, splitting and the
//! synthetic BoT-IoT surrogate.

mod csv_io;
mod ops;
mod store;
mod synth;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{parse_flow_csv, write_flow_csv};
pub use ops::{drop_columns, stratified_split, DEFAULT_DROP_COLUMNS};
pub use store::{read_dataset, write_dataset, DATASET_FORMAT_VERSION};
pub use synth::{bot_iot_layout, generate_synthetic_flows, SynthesisSpec};

/// Label column used by BoT-IoT exports and the synthetic generator.
pub const LABEL_COLUMN: &str = "category";
pub const ATTACK_LABEL: &str = "DDoS";
pub const BENIGN_LABEL: &str = "Normal";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Numeric,
    CategoricalString,
    /// Carried along (label column, identifiers) but never a feature.
    Meta,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::CategoricalString => "categorical-string",
            ColumnKind::Meta => "meta",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDescriptor {
    pub name: String,
    pub kind: ColumnKind,
    /// Ordinal position among all columns of the dataset.
    pub index: usize,
}

/// Column-described flow records.
///
/// Numeric columns live in a row-major matrix whose column order follows
/// the order of the numeric descriptors. Categorical and meta columns are
/// stored as text, one vector per column. Labels are `1` for attack and
/// `0` for benign.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowDataset {
    columns: Vec<ColumnDescriptor>,
    matrix: Vec<f64>,
    text: Vec<Vec<String>>,
    labels: Option<Vec<u8>>,
    row_count: usize,
    dropped: Vec<String>,
}

impl FlowDataset {
    /// Builds a dataset from column specs in order.
    ///
    /// `matrix` is row-major over the numeric columns; `text` holds one
    /// vector per non-numeric column, in column order.
    pub fn from_parts(
        columns: Vec<(String, ColumnKind)>,
        row_count: usize,
        matrix: Vec<f64>,
        text: Vec<Vec<String>>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for (name, _) in &columns {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        let columns: Vec<ColumnDescriptor> = columns
            .into_iter()
            .enumerate()
            .map(|(index, (name, kind))| ColumnDescriptor { name, kind, index })
            .collect();
        let width = columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Numeric)
            .count();
        if matrix.len() != width * row_count {
            return Err(Error::LengthMismatch {
                expected: width * row_count,
                found: matrix.len(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite value in feature matrix".into()));
        }
        let text_width = columns.len() - width;
        if text.len() != text_width {
            return Err(Error::LengthMismatch {
                expected: text_width,
                found: text.len(),
            });
        }
        if let Some(bad) = text.iter().find(|c| c.len() != row_count) {
            return Err(Error::LengthMismatch {
                expected: row_count,
                found: bad.len(),
            });
        }
        if let Some(labels) = &labels {
            if labels.len() != row_count {
                return Err(Error::LengthMismatch {
                    expected: row_count,
                    found: labels.len(),
                });
            }
            if labels.iter().any(|&l| l > 1) {
                return Err(Error::Format("labels must be 0 or 1".into()));
            }
        }
        Ok(FlowDataset {
            columns,
            matrix,
            text,
            labels,
            row_count,
            dropped: Vec::new(),
        })
    }

    /// A dataset with only numeric feature columns.
    pub fn from_features(
        names: Vec<String>,
        matrix: Vec<f64>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        let width = names.len();
        if width == 0 {
            if !matrix.is_empty() {
                return Err(Error::LengthMismatch {
                    expected: 0,
                    found: matrix.len(),
                });
            }
        } else if !matrix.len().is_multiple_of(width) {
            return Err(Error::LengthMismatch {
                expected: width * (matrix.len() / width + 1),
                found: matrix.len(),
            });
        }
        let rows = match (width, &labels) {
            (0, Some(l)) => l.len(),
            (0, None) => 0,
            _ => matrix.len() / width,
        };
        let columns = names
            .into_iter()
            .map(|n| (n, ColumnKind::Numeric))
            .collect();
        Self::from_parts(columns, rows, matrix, Vec::new(), labels)
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn is_empty(&self) -> bool {
        self.row_count == 0
    }

    pub fn columns(&self) -> &[ColumnDescriptor] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&ColumnDescriptor> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Numeric column descriptors, in matrix order.
    pub fn feature_columns(&self) -> impl Iterator<Item = &ColumnDescriptor> {
        self.columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Numeric)
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.feature_columns().map(|c| c.name.clone()).collect()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_columns().count()
    }

    /// Matrix position of a numeric column.
    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_columns().position(|c| c.name == name)
    }

    /// Row-major numeric values.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.feature_count();
        &self.matrix[i * w..(i + 1) * w]
    }

    /// Copies out one numeric column by matrix position.
    pub fn feature_values(&self, j: usize) -> Vec<f64> {
        let w = self.feature_count();
        self.matrix.iter().skip(j).step_by(w.max(1)).copied().collect()
    }

    /// All numeric columns, column-major.
    pub fn feature_vectors(&self) -> Vec<Vec<f64>> {
        let w = self.feature_count();
        let mut cols = vec![Vec::with_capacity(self.row_count); w];
        for row in self.matrix.chunks_exact(w.max(1)) {
            for (col, &v) in cols.iter_mut().zip(row) {
                col.push(v);
            }
        }
        cols
    }

    pub fn text_values(&self, name: &str) -> Option<&[String]> {
        let pos = self
            .columns
            .iter()
            .filter(|c| c.kind != ColumnKind::Numeric)
            .position(|c| c.name == name)?;
        Some(&self.text[pos])
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn require_labels(&self) -> Result<&[u8]> {
        self.labels().ok_or(Error::Unlabeled)
    }

    /// `(benign, attack)` row counts.
    pub fn class_counts(&self) -> Result<(usize, usize)> {
        let labels = self.require_labels()?;
        let attack = labels.iter().filter(|&&l| l == 1).count();
        Ok((labels.len() - attack, attack))
    }

    /// Column names removed by earlier [`drop_columns`] calls.
    pub fn dropped_columns(&self) -> &[String] {
        &self.dropped
    }

    pub(crate) fn text_columns(&self) -> &[Vec<String>] {
        &self.text
    }

    /// Subset of rows in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FlowDataset {
        let w = self.feature_count();
        let mut matrix = Vec::with_capacity(rows.len() * w);
        for &r in rows {
            matrix.extend_from_slice(&self.matrix[r * w..(r + 1) * w]);
        }
        let text = self
            .text
            .iter()
            .map(|col| rows.iter().map(|&r| col[r].clone()).collect())
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| rows.iter().map(|&r| l[r]).collect());
        FlowDataset {
            columns: self.columns.clone(),
            matrix,
            text,
            labels,
            row_count: rows.len(),
            dropped: self.dropped.clone(),
        }
    }

    /// Keeps the named numeric columns (in the given order) and every
    /// non-numeric column.
    pub fn select_features<S: AsRef<str>>(&self, names: &[S]) -> Result<FlowDataset> {
        let positions = names
            .iter()
            .map(|n| {
                self.feature_index(n.as_ref())
                    .ok_or_else(|| Error::MissingColumn(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let w = self.feature_count();
        let mut matrix = Vec::with_capacity(self.row_count * positions.len());
        for row in self.matrix.chunks_exact(w.max(1)).take(self.row_count) {
            matrix.extend(positions.iter().map(|&p| row[p]));
        }
        let mut columns: Vec<(String, ColumnKind)> = names
            .iter()
            .map(|n| (n.as_ref().to_string(), ColumnKind::Numeric))
            .collect();
        columns.extend(
            self.columns
                .iter()
                .filter(|c| c.kind != ColumnKind::Numeric)
                .map(|c| (c.name.clone(), c.kind)),
        );
        let mut out = Self::from_parts(
            columns,
            self.row_count,
            matrix,
            self.text.clone(),
            self.labels.clone(),
        )?;
        out.dropped = self.dropped.clone();
        Ok(out)
    }

    /// Same columns and labels, new numeric values.
    pub fn with_matrix(&self, matrix: Vec<f64>) -> Result<FlowDataset> {
        if matrix.len() != self.matrix.len() {
            return Err(Error::LengthMismatch {
                expected: self.matrix.len(),
                found: matrix.len(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite value in feature matrix".into()));
        }
        Ok(FlowDataset {
            matrix,
            ..self.clone()
        })
    }

    /// Same columns, new labels.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<FlowDataset> {
        Self::from_parts(
            self.columns
                .iter()
                .map(|c| (c.name.clone(), c.kind))
                .collect(),
            self.row_count,
            self.matrix.clone(),
            self.text.clone(),
            Some(labels),
        )
        .map(|mut ds| {
            ds.dropped = self.dropped.clone();
            ds
        })
    }

    /// Appends rows. `text` rows are given per non-numeric column.
    pub(crate) fn append_rows(
        &mut self,
        matrix: &[f64],
        text_rows: Vec<Vec<String>>,
        labels: &[u8],
    ) {
        debug_assert_eq!(matrix.len(), labels.len() * self.feature_count());
        self.matrix.extend_from_slice(matrix);
        for (col, extra) in self.text.iter_mut().zip(text_rows) {
            col.extend(extra);
        }
        if let Some(l) = self.labels.as_mut() {
            l.extend_from_slice(labels);
        }
        self.row_count += labels.len();
    }

    pub(crate) fn set_dropped(&mut self, dropped: Vec<String>) {
        self.dropped = dropped;
    }
}

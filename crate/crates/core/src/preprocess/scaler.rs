use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow_data::FlowDataset;

/// Per-column mean and population standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<String>,
    pub mean: Vec<f64>,
    pub stdev: Vec<f64>,
}

impl ScalerParams {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// `(x - mean) / stdev`, or 0 for a constant column.
    pub fn scale(&self, j: usize, x: f64) -> f64 {
        if self.stdev[j] > 0.0 {
            (x - self.mean[j]) / self.stdev[j]
        } else {
            0.0
        }
    }

    /// Inverse of [`scale`](Self::scale); constant columns come back as their mean.
    pub fn unscale(&self, j: usize, z: f64) -> f64 {
        z * self.stdev[j] + self.mean[j]
    }

    /// Parameters for a subset of columns, in the given order.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<ScalerParams> {
        let mut out = ScalerParams {
            columns: Vec::with_capacity(names.len()),
            mean: Vec::with_capacity(names.len()),
            stdev: Vec::with_capacity(names.len()),
        };
        for name in names {
            let name = name.as_ref();
            let j = self
                .columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
            out.columns.push(name.to_string());
            out.mean.push(self.mean[j]);
            out.stdev.push(self.stdev[j]);
        }
        Ok(out)
    }

    /// Scales a row-major matrix whose columns follow `self.columns`.
    pub fn transform(&self, matrix: &[f64]) -> Vec<f64> {
        let w = self.len().max(1);
        matrix
            .iter()
            .enumerate()
            .map(|(k, &x)| self.scale(k % w, x))
            .collect()
    }

    pub fn inverse_transform(&self, matrix: &[f64]) -> Vec<f64> {
        let w = self.len().max(1);
        matrix
            .iter()
            .enumerate()
            .map(|(k, &z)| self.unscale(k % w, z))
            .collect()
    }
}

pub fn fit_scaler(train: &FlowDataset) -> Result<ScalerParams> {
    if train.is_empty() {
        return Err(Error::Empty);
    }
    let n = train.row_count() as f64;
    let columns = train.feature_vectors();
    let mean: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n).collect();
    let stdev = columns
        .iter()
        .zip(&mean)
        .map(|(c, &m)| (c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    Ok(ScalerParams {
        columns: train.feature_names(),
        mean,
        stdev,
    })
}

pub fn apply_scaler(params: &ScalerParams, ds: &FlowDataset) -> Result<FlowDataset> {
    let names = ds.feature_names();
    if names != params.columns {
        return Err(Error::ColumnMismatch(format!(
            "scaler fitted on {:?}, dataset has {:?}",
            params.columns, names
        )));
    }
    ds.with_matrix(params.transform(ds.matrix()))
}

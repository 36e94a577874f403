use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DroppedFeature, SelectedFeatures, SelectionMethod};
use crate::error::{Error, Result};
use crate::flow_data::FlowDataset;

/// Deviations from the mean and their sum of squares.
struct Centered {
    dev: Vec<f64>,
    ss: f64,
}

fn center(x: &[f64]) -> Centered {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let ss = dev.iter().map(|d| d * d).sum();
    Centered { dev, ss }
}

fn r_centered(x: &Centered, y: &Centered) -> f64 {
    if x.ss == 0.0 || y.ss == 0.0 {
        return 0.0;
    }
    let cross: f64 = x.dev.iter().zip(&y.dev).map(|(a, b)| a * b).sum();
    (cross / (x.ss * y.ss).sqrt()).clamp(-1.0, 1.0)
}

/// Pearson correlation coefficient. A constant input gives 0.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidConfig(
            "correlation needs at least two observations".into(),
        ));
    }
    Ok(r_centered(&center(x), &center(y)))
}

/// Symmetric matrix of pairwise `r` over the numeric columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// Row-major, `names.len()` square.
    pub values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size() + j]
    }
}

/// Entries agree bit-for-bit with [`pearson_r`] on the same columns. The
/// diagonal is 1, or 0 for a constant column.
pub fn correlation_matrix(ds: &FlowDataset) -> Result<CorrelationMatrix> {
    if ds.row_count() < 2 {
        return Err(Error::InvalidConfig(
            "correlation needs at least two rows".into(),
        ));
    }
    let centered: Vec<Centered> = ds.feature_vectors().par_iter().map(|c| center(c)).collect();
    let p = centered.len();
    let upper: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            (i + 1..p)
                .map(|j| r_centered(&centered[i], &centered[j]))
                .collect()
        })
        .collect();
    let mut values = vec![0.0; p * p];
    for i in 0..p {
        values[i * p + i] = if centered[i].ss == 0.0 { 0.0 } else { 1.0 };
        for (off, &r) in upper[i].iter().enumerate() {
            let j = i + 1 + off;
            values[i * p + j] = r;
            values[j * p + i] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: ds.feature_names(),
        values,
    })
}

/// Drops the later column of every pair with `|r| > threshold`.
///
/// Columns are visited in order; a column is dropped when some already
/// kept column correlates with it above the threshold, and the first such
/// column is recorded as its partner. Labels play no part.
pub fn correlation_filter(ds: &FlowDataset, threshold: f64) -> Result<SelectedFeatures> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "correlation threshold {threshold} not in (0, 1)"
        )));
    }
    let m = correlation_matrix(ds)?;
    let p = m.size();
    let mut kept: Vec<usize> = Vec::new();
    let mut kept_scores: Vec<f64> = Vec::new();
    let mut dropped = Vec::new();
    for j in 0..p {
        match kept
            .iter()
            .position(|&i| m.get(i, j).abs() > threshold)
        {
            Some(slot) => {
                let r = m.get(kept[slot], j).abs();
                kept_scores[slot] = kept_scores[slot].max(r);
                dropped.push(DroppedFeature {
                    name: m.names[j].clone(),
                    score: r,
                    partner: Some(m.names[kept[slot]].clone()),
                });
            }
            None => {
                kept.push(j);
                kept_scores.push(0.0);
            }
        }
    }
    Ok(SelectedFeatures {
        method: SelectionMethod::Correlation,
        threshold_or_k: threshold,
        kept: kept.iter().map(|&i| m.names[i].clone()).collect(),
        scores: kept_scores,
        dropped,
        ranking: Vec::new(),
    })
}

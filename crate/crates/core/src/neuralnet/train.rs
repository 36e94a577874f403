use std::time::Instant;

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::model::Model;
use super::network::Network;
use crate::error::{Error, Result};
use crate::flow_data::FlowDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            epochs: 10,
            batch_size: 32,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig("epochs and batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        if !((0.0..1.0).contains(&self.adam_beta1) && (0.0..1.0).contains(&self.adam_beta2)) {
            return Err(Error::InvalidConfig("Adam betas must be in [0, 1)".into()));
        }
        if self.adam_eps.is_nan() || self.adam_eps <= 0.0 {
            return Err(Error::InvalidConfig("adam_eps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mean_loss: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub epochs: Vec<EpochRecord>,
}

impl TrainingHistory {
    pub fn epoch_seconds_total(&self) -> f64 {
        self.epochs.iter().map(|e| e.seconds).sum()
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.mean_loss)
    }
}

/// Mini-batch Adam over `epochs` passes. Each pass visits the rows in a
/// fresh seeded permutation (when `shuffle` is set) and takes one step per
/// batch of up to `batch_size` rows.
pub fn fit_network(
    net: &mut Network,
    x: ArrayView2<f64>,
    labels: &[u8],
    cfg: &TrainingConfig,
) -> Result<TrainingHistory> {
    cfg.validate()?;
    if x.nrows() == 0 {
        return Err(Error::Empty);
    }
    if labels.len() != x.nrows() {
        return Err(Error::LengthMismatch {
            expected: x.nrows(),
            found: labels.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = AdamState::new(net);
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut history = TrainingHistory::default();
    let mut batch_labels = Vec::with_capacity(cfg.batch_size);
    for epoch in 1..=cfg.epochs {
        let started = Instant::now();
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Array2<f64> = x.select(Axis(0), chunk);
            batch_labels.clear();
            batch_labels.extend(chunk.iter().map(|&i| labels[i]));
            let (loss, grads) = net.backward(batch.view(), &batch_labels)?;
            if !loss.is_finite() {
                return Err(Error::Numeric(format!("loss became {loss} in epoch {epoch}")));
            }
            adam_step(net, &grads, &mut state, cfg)?;
            loss_sum += loss * chunk.len() as f64;
        }
        if net.tensors().iter().any(|t| t.iter().any(|v| !v.is_finite())) {
            return Err(Error::Numeric(format!("parameters diverged in epoch {epoch}")));
        }
        history.epochs.push(EpochRecord {
            epoch,
            mean_loss: loss_sum / x.nrows() as f64,
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok(history)
}

/// Trains `model` on a dataset that is already scaled and restricted to
/// the model's input features (extra columns are ignored).
pub fn train(
    mut model: Model,
    train_ds: &FlowDataset,
    cfg: &TrainingConfig,
) -> Result<(Model, TrainingHistory)> {
    if train_ds.is_empty() {
        return Err(Error::Empty);
    }
    let ds = train_ds.select_features(&model.input_features)?;
    let labels = ds.require_labels()?;
    let x = ArrayView2::from_shape((ds.row_count(), model.input_features.len()), ds.matrix())
        .map_err(|e| Error::ColumnMismatch(e.to_string()))?;
    let history = fit_network(&mut model.network, x, labels, cfg)?;
    model.training = Some(cfg.clone());
    Ok((model, history))
}

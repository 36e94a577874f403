use ndarray::{Array1, Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::activation::Activation;
use super::dense::{DenseCache, DenseLayer};
use super::loss::bce_loss;
use super::lstm::{LstmCache, LstmCell};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mlp,
    Lstm,
}

impl ModelKind {
    /// Name used in comparison tables.
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Mlp => "ANN",
            ModelKind::Lstm => "LSTM",
        }
    }
}

/// A layer in a feed-forward stack. LSTM layers see each row as a
/// length-1 sequence starting from the zero state.
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Layer {
    Dense(DenseLayer),
    Lstm(LstmCell),
}

impl Layer {
    pub fn inputs(&self) -> usize {
        match self {
            Layer::Dense(d) => d.inputs(),
            Layer::Lstm(c) => c.input_size,
        }
    }

    pub fn outputs(&self) -> usize {
        match self {
            Layer::Dense(d) => d.outputs(),
            Layer::Lstm(c) => c.hidden_size,
        }
    }

    fn tensors(&self) -> Vec<&[f64]> {
        match self {
            Layer::Dense(d) => vec![contiguous(&d.weights), contiguous1(&d.bias)],
            Layer::Lstm(c) => c
                .gates()
                .into_iter()
                .flat_map(|g| [contiguous(&g.weights), contiguous1(&g.bias)])
                .collect(),
        }
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            Layer::Dense(d) => vec![
                d.weights.as_slice_mut().expect("standard layout"),
                d.bias.as_slice_mut().expect("standard layout"),
            ],
            Layer::Lstm(c) => c
                .gates_mut()
                .into_iter()
                .flat_map(|g| {
                    [
                        g.weights.as_slice_mut().expect("standard layout"),
                        g.bias.as_slice_mut().expect("standard layout"),
                    ]
                })
                .collect(),
        }
    }
}

fn contiguous(a: &Array2<f64>) -> &[f64] {
    a.as_slice().expect("standard layout")
}

fn contiguous1(a: &Array1<f64>) -> &[f64] {
    a.as_slice().expect("standard layout")
}

#[allow(clippy::large_enum_variant)]
enum LayerCache {
    Dense(DenseCache),
    Lstm(LstmCache),
}

/// Stack of layers ending in a single sigmoid unit.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

/// Parameter-shaped gradients; the layer list mirrors the network's.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(Layer::tensors).collect()
    }
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        let last = match layers.last() {
            Some(Layer::Dense(d)) => d,
            _ => {
                return Err(Error::InvalidConfig(
                    "network must end in a dense layer".into(),
                ))
            }
        };
        if last.outputs() != 1 || last.activation != Activation::Sigmoid {
            return Err(Error::InvalidConfig(
                "output layer must be one sigmoid unit".into(),
            ));
        }
        for pair in layers.windows(2) {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::InvalidConfig(format!(
                    "layer widths do not chain: {} -> {}",
                    pair[0].outputs(),
                    pair[1].inputs()
                )));
            }
        }
        let net = Network { layers };
        if net.tensors().iter().any(|t| t.iter().any(|v| !v.is_finite())) {
            return Err(Error::Numeric("non-finite parameter".into()));
        }
        Ok(net)
    }

    /// ReLU hidden layers of the given widths, then one sigmoid unit.
    pub fn mlp(inputs: usize, hidden: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut width = inputs;
        for &h in hidden {
            layers.push(Layer::Dense(DenseLayer::glorot(width, h, Activation::Relu, &mut rng)));
            width = h;
        }
        layers.push(Layer::Dense(DenseLayer::glorot(width, 1, Activation::Sigmoid, &mut rng)));
        Network { layers }
    }

    /// Stacked LSTM layers of the given widths, then a dense sigmoid head.
    pub fn lstm(inputs: usize, hidden: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut width = inputs;
        for &h in hidden {
            layers.push(Layer::Lstm(LstmCell::glorot(width, h, &mut rng)));
            width = h;
        }
        layers.push(Layer::Dense(DenseLayer::glorot(width, 1, Activation::Sigmoid, &mut rng)));
        Network { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn kind(&self) -> ModelKind {
        if self.layers.iter().any(|l| matches!(l, Layer::Lstm(_))) {
            ModelKind::Lstm
        } else {
            ModelKind::Mlp
        }
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Every parameter tensor, row-major, in a fixed order.
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(Layer::tensors).collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(Layer::tensors_mut).collect()
    }

    fn check_width(&self, batch: &ArrayView2<f64>) -> Result<()> {
        if batch.ncols() != self.input_width() {
            return Err(Error::ColumnMismatch(format!(
                "network expects {} inputs, batch has {}",
                self.input_width(),
                batch.ncols()
            )));
        }
        Ok(())
    }

    /// Attack probability per row.
    pub fn forward(&self, batch: ArrayView2<f64>) -> Result<Array1<f64>> {
        self.check_width(&batch)?;
        let mut x = batch.to_owned();
        for layer in &self.layers {
            x = match layer {
                Layer::Dense(d) => d.forward(x.view()),
                Layer::Lstm(c) => c.step(x.view(), None).h,
            };
        }
        Ok(x.column(0).to_owned())
    }

    /// Mean BCE over the batch and its exact gradient.
    pub fn backward(&self, batch: ArrayView2<f64>, labels: &[u8]) -> Result<(f64, Gradients)> {
        self.check_width(&batch)?;
        if labels.len() != batch.nrows() {
            return Err(Error::LengthMismatch {
                expected: batch.nrows(),
                found: labels.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::Empty);
        }
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut x = batch.to_owned();
        for layer in &self.layers {
            match layer {
                Layer::Dense(d) => {
                    let cache = d.forward_cached(x);
                    x = cache.output.clone();
                    caches.push(LayerCache::Dense(cache));
                }
                Layer::Lstm(c) => {
                    let (state, cache) = c.step_cached(x, None);
                    x = state.h;
                    caches.push(LayerCache::Lstm(cache));
                }
            }
        }
        let probs = x.column(0);
        let loss = bce_loss(probs.as_slice().unwrap_or(&probs.to_vec()), labels)?;

        // Sigmoid output with BCE: dL/dz = (p - y) / n.
        let n = labels.len() as f64;
        let mut grad = Array2::from_shape_fn((labels.len(), 1), |(r, _)| {
            (probs[r] - f64::from(labels[r])) / n
        });
        let mut grads = Vec::with_capacity(self.layers.len());
        for (idx, (layer, cache)) in self.layers.iter().zip(&caches).enumerate().rev() {
            let is_output = idx + 1 == self.layers.len();
            match (layer, cache) {
                (Layer::Dense(d), LayerCache::Dense(cache)) => {
                    let dz = if is_output {
                        grad
                    } else {
                        d.pre_activation_grad(&grad, cache)
                    };
                    let (g, dx) = d.backward_from_pre(&dz, cache);
                    grads.push(Layer::Dense(g));
                    grad = dx;
                }
                (Layer::Lstm(c), LayerCache::Lstm(cache)) => {
                    let (g, dx, _) = c.backward(&grad, None, cache);
                    grads.push(Layer::Lstm(g));
                    grad = dx;
                }
                _ => unreachable!("cache kind follows layer kind"),
            }
        }
        grads.reverse();
        Ok((loss, Gradients { layers: grads }))
    }
}

/// Forward pass of an MLP; rejects LSTM networks.
pub fn mlp_forward(net: &Network, batch: ArrayView2<f64>) -> Result<Array1<f64>> {
    if net.kind() != ModelKind::Mlp {
        return Err(Error::InvalidConfig("not an MLP".into()));
    }
    net.forward(batch)
}

/// Forward pass of an LSTM classifier; rejects MLPs.
pub fn lstm_forward(net: &Network, batch: ArrayView2<f64>) -> Result<Array1<f64>> {
    if net.kind() != ModelKind::Lstm {
        return Err(Error::InvalidConfig("not an LSTM network".into()));
    }
    net.forward(batch)
}

use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::activation::Activation;
use super::dense::DenseLayer;
use super::lstm::{GateParams, LstmCell};
use super::network::{Layer, ModelKind, Network};
use super::train::TrainingConfig;
use crate::error::{Error, Result};
use crate::feature_select::SelectedFeatures;
use crate::flow_data::FlowDataset;
use crate::fsutil::{read_json, write_json_atomic};
use crate::preprocess::ScalerParams;

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MODEL_FORMAT_NAME: &str = "ddosflow-model";
const PREDICT_CHUNK: usize = 8192;

/// A trained classifier together with everything needed to score raw rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub network: Network,
    /// Network inputs, in order.
    pub input_features: Vec<String>,
    /// Fitted on the training split; covers at least `input_features`.
    pub scaler: ScalerParams,
    pub selection: SelectedFeatures,
    pub training: Option<TrainingConfig>,
    /// Weight-initialization seed.
    pub seed: u64,
}

impl Model {
    pub fn new(
        network: Network,
        input_features: Vec<String>,
        scaler: ScalerParams,
        selection: SelectedFeatures,
        seed: u64,
    ) -> Result<Self> {
        if network.input_width() != input_features.len() {
            return Err(Error::ColumnMismatch(format!(
                "network takes {} inputs but {} features were given",
                network.input_width(),
                input_features.len()
            )));
        }
        scaler.subset(&input_features)?;
        Ok(Model {
            network,
            input_features,
            scaler,
            selection,
            training: None,
            seed,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.network.kind()
    }

    /// Probabilities for rows that are already scaled and ordered as
    /// `input_features`.
    pub fn predict_proba_scaled(&self, batch: ArrayView2<f64>) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(batch.nrows());
        for start in (0..batch.nrows()).step_by(PREDICT_CHUNK) {
            let end = (start + PREDICT_CHUNK).min(batch.nrows());
            let chunk = batch.slice(ndarray::s![start..end, ..]);
            out.extend(self.network.forward(chunk)?);
        }
        Ok(out)
    }

    /// Probabilities for raw rows; selection and scaling come from the
    /// stored parameters.
    pub fn predict_proba(&self, ds: &FlowDataset) -> Result<Vec<f64>> {
        let selected = ds.select_features(&self.input_features)?;
        let scaler = self.scaler.subset(&self.input_features)?;
        let scaled = scaler.transform(selected.matrix());
        let x = ArrayView2::from_shape((ds.row_count(), self.input_features.len()), &scaled)
            .map_err(|e| Error::ColumnMismatch(e.to_string()))?;
        self.predict_proba_scaled(x)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelFile>(text)?.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json_atomic(path.as_ref(), &ModelFile::from(self))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_json::<ModelFile>(path.as_ref())?.try_into()
    }
}

/// 1 where the probability is strictly above `threshold`.
pub fn classify(probs: &[f64], threshold: f64) -> Vec<u8> {
    probs.iter().map(|&p| u8::from(p > threshold)).collect()
}

pub fn predict(model: &Model, ds: &FlowDataset, threshold: f64) -> Result<Vec<u8>> {
    Ok(classify(&model.predict_proba(ds)?, threshold))
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    format_version: u32,
    kind: ModelKind,
    layers: Vec<LayerSpec>,
    input_features: Vec<String>,
    scaler: ScalerParams,
    selection: SelectedFeatures,
    training: Option<TrainingConfig>,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum LayerSpec {
    Dense {
        inputs: usize,
        outputs: usize,
        activation: Activation,
        /// outputs × inputs, row-major
        weights: Vec<f64>,
        bias: Vec<f64>,
    },
    Lstm {
        input_size: usize,
        hidden_size: usize,
        input_gate: GateSpec,
        forget_gate: GateSpec,
        output_gate: GateSpec,
        candidate: GateSpec,
    },
}

#[derive(Serialize, Deserialize)]
struct GateSpec {
    /// hidden × (input + hidden), row-major
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl From<&GateParams> for GateSpec {
    fn from(g: &GateParams) -> Self {
        GateSpec {
            weights: g.weights.iter().copied().collect(),
            bias: g.bias.to_vec(),
        }
    }
}

impl From<&Model> for ModelFile {
    fn from(m: &Model) -> Self {
        let layers = m
            .network
            .layers()
            .iter()
            .map(|layer| match layer {
                Layer::Dense(d) => LayerSpec::Dense {
                    inputs: d.inputs(),
                    outputs: d.outputs(),
                    activation: d.activation,
                    weights: d.weights.iter().copied().collect(),
                    bias: d.bias.to_vec(),
                },
                Layer::Lstm(c) => LayerSpec::Lstm {
                    input_size: c.input_size,
                    hidden_size: c.hidden_size,
                    input_gate: (&c.input_gate).into(),
                    forget_gate: (&c.forget_gate).into(),
                    output_gate: (&c.output_gate).into(),
                    candidate: (&c.candidate).into(),
                },
            })
            .collect();
        ModelFile {
            format: MODEL_FORMAT_NAME.into(),
            format_version: MODEL_FORMAT_VERSION,
            kind: m.kind(),
            layers,
            input_features: m.input_features.clone(),
            scaler: m.scaler.clone(),
            selection: m.selection.clone(),
            training: m.training.clone(),
            seed: m.seed,
        }
    }
}

fn matrix(rows: usize, cols: usize, values: Vec<f64>) -> Result<Array2<f64>> {
    Array2::from_shape_vec((rows, cols), values)
        .map_err(|e| Error::Format(format!("weight matrix {rows}x{cols}: {e}")))
}

fn vector(len: usize, values: Vec<f64>) -> Result<Array1<f64>> {
    if values.len() != len {
        return Err(Error::Format(format!(
            "bias has {} values, expected {len}",
            values.len()
        )));
    }
    Ok(Array1::from(values))
}

fn gate(spec: GateSpec, input_size: usize, hidden_size: usize) -> Result<GateParams> {
    Ok(GateParams {
        weights: matrix(hidden_size, input_size + hidden_size, spec.weights)?,
        bias: vector(hidden_size, spec.bias)?,
    })
}

impl TryFrom<ModelFile> for Model {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<Self> {
        if file.format != MODEL_FORMAT_NAME {
            return Err(Error::Format(format!("not a model file: {}", file.format)));
        }
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported model format version {}",
                file.format_version
            )));
        }
        let layers = file
            .layers
            .into_iter()
            .map(|spec| {
                Ok(match spec {
                    LayerSpec::Dense {
                        inputs,
                        outputs,
                        activation,
                        weights,
                        bias,
                    } => Layer::Dense(DenseLayer {
                        weights: matrix(outputs, inputs, weights)?,
                        bias: vector(outputs, bias)?,
                        activation,
                    }),
                    LayerSpec::Lstm {
                        input_size,
                        hidden_size,
                        input_gate,
                        forget_gate,
                        output_gate,
                        candidate,
                    } => Layer::Lstm(LstmCell {
                        input_size,
                        hidden_size,
                        input_gate: gate(input_gate, input_size, hidden_size)?,
                        forget_gate: gate(forget_gate, input_size, hidden_size)?,
                        output_gate: gate(output_gate, input_size, hidden_size)?,
                        candidate: gate(candidate, input_size, hidden_size)?,
                    }),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let network = Network::new(layers)?;
        if network.kind() != file.kind {
            return Err(Error::Format("model kind does not match its layers".into()));
        }
        let mut model = Model::new(
            network,
            file.input_features,
            file.scaler,
            file.selection,
            file.seed,
        )?;
        model.training = file.training;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model(kind: ModelKind) -> Model {
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let net = match kind {
            ModelKind::Mlp => Network::mlp(2, &[3, 3], 4),
            ModelKind::Lstm => Network::lstm(2, &[3, 2], 4),
        };
        let scaler = ScalerParams {
            columns: names.clone(),
            mean: vec![1.0, -2.0, 0.5],
            stdev: vec![2.0, 0.0, 4.0],
        };
        Model::new(net, vec!["c".into(), "a".into()], scaler, SelectedFeatures::all(names), 4).unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        for kind in [ModelKind::Mlp, ModelKind::Lstm] {
            let model = toy_model(kind);
            let back = Model::from_json(&model.to_json().unwrap()).unwrap();
            assert_eq!(back, model);
        }
    }

    #[test]
    fn raw_and_prescaled_agree() {
        let model = toy_model(ModelKind::Mlp);
        let ds = FlowDataset::from_features(
            vec!["a".into(), "b".into(), "c".into()],
            vec![3.0, 9.0, 4.5, -1.0, 1.0, 0.5],
            None,
        )
        .unwrap();
        let raw = model.predict_proba(&ds).unwrap();
        // c then a, scaled by hand.
        let pre = ndarray::array![[(4.5 - 0.5) / 4.0, (3.0 - 1.0) / 2.0], [0.0, (-1.0 - 1.0) / 2.0]];
        assert_eq!(raw, model.predict_proba_scaled(pre.view()).unwrap());
    }

    #[test]
    fn threshold_is_strict() {
        assert_eq!(classify(&[0.5, 0.50001, 0.2], 0.5), vec![0, 1, 0]);
        assert_eq!(classify(&[1e-300, 0.3], 0.0), vec![1, 1]);
    }

    #[test]
    fn missing_feature_errors() {
        let model = toy_model(ModelKind::Lstm);
        let ds = FlowDataset::from_features(vec!["a".into()], vec![1.0], None).unwrap();
        assert!(matches!(predict(&model, &ds, 0.5), Err(Error::MissingColumn(_))));
    }

    #[test]
    fn width_must_match_features() {
        let m = toy_model(ModelKind::Mlp);
        assert!(Model::new(m.network.clone(), vec!["a".into()], m.scaler.clone(), m.selection.clone(), 0).is_err());
    }
}

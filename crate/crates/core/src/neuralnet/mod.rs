//! Dense and LSTM binary classifiers trained with mini-batch Adam on
//! binary cross-entropy.

mod activation;
mod adam;
mod dense;
mod loss;
mod lstm;
mod model;
mod network;
mod train;

pub use activation::{relu, sigmoid, Activation};
pub use adam::{adam_step, AdamState};
pub use dense::DenseLayer;
pub use loss::{bce_loss, EPSILON};
pub use lstm::{GateParams, LstmCell, LstmState};
pub use model::{classify, predict, Model, MODEL_FORMAT_VERSION};
pub use network::{lstm_forward, mlp_forward, Gradients, Layer, ModelKind, Network};
pub use train::{fit_network, train, EpochRecord, TrainingConfig, TrainingHistory};

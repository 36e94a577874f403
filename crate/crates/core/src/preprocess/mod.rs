//! Class rebalancing, standardization and categorical encoding.

mod onehot;
mod scaler;
mod smote;

pub use onehot::one_hot_encode;
pub use scaler::{apply_scaler, fit_scaler, ScalerParams};
pub use smote::{smote_resample, smote_resample_traced, SmoteConfig, SmoteOutcome, SyntheticOrigin};

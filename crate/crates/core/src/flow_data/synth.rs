use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ColumnKind, FlowDataset, ATTACK_LABEL, BENIGN_LABEL, LABEL_COLUMN};
use crate::error::{Error, Result};

/// Upper bound on the number of base features that carry the class signal.
const MAX_INFORMATIVE: usize = 8;
const DUPLICATE_NOISE: f64 = 0.01;

/// Parameters of the synthetic flow surrogate.
///
/// The first `feature_count - planted_duplicate_pairs` columns are
/// independent base features with unit-variance, bounded noise. The class
/// signal is spread evenly over the first `min(8, base)` of them so the
/// attack and benign means sit `class_separation` apart. The trailing
/// `planted_duplicate_pairs` columns are noisy affine copies of the last
/// base columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSpec {
    pub attack_count: usize,
    pub benign_count: usize,
    pub feature_count: usize,
    pub planted_duplicate_pairs: usize,
    pub class_separation: f64,
    pub seed: u64,
}

impl SynthesisSpec {
    pub fn validate(&self) -> Result<()> {
        if self.feature_count < 2 {
            return Err(Error::InvalidConfig("feature_count must be at least 2".into()));
        }
        if self.feature_count < 2 * self.planted_duplicate_pairs {
            return Err(Error::InvalidConfig(format!(
                "{} duplicate pairs need at least {} features, got {}",
                self.planted_duplicate_pairs,
                2 * self.planted_duplicate_pairs,
                self.feature_count
            )));
        }
        if !(self.class_separation >= 0.0 && self.class_separation.is_finite()) {
            return Err(Error::InvalidConfig(
                "class_separation must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn base_feature_count(&self) -> usize {
        self.feature_count - self.planted_duplicate_pairs
    }

    /// Base feature positions that carry the class signal.
    pub fn informative_features(&self) -> std::ops::Range<usize> {
        0..self.base_feature_count().min(MAX_INFORMATIVE)
    }

    /// `(source, copy)` column positions; the copy is always the later one.
    pub fn planted_pairs(&self) -> Vec<(usize, usize)> {
        let base = self.base_feature_count();
        let d = self.planted_duplicate_pairs;
        (0..d).map(|p| (base - d + p, base + p)).collect()
    }

    pub fn feature_names(&self) -> Vec<String> {
        let digits = (self.feature_count.saturating_sub(1)).to_string().len().max(2);
        (0..self.feature_count)
            .map(|j| format!("f{j:0digits$}"))
            .collect()
    }
}

/// Sum of three U(-1, 1): mean 0, variance 1, support [-3, 3].
fn bounded_noise(rng: &mut ChaCha8Rng) -> f64 {
    (0..3).map(|_| rng.random_range(-1.0..1.0)).sum()
}

/// Generates the labelled surrogate described by `spec`. Rows are shuffled
/// so classes interleave; a `category` meta column carries the label text.
pub fn generate_synthetic_flows(spec: &SynthesisSpec) -> Result<FlowDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.attack_count + spec.benign_count;
    let width = spec.feature_count;
    let base = spec.base_feature_count();
    let informative = spec.informative_features();
    let shift = if informative.is_empty() {
        0.0
    } else {
        0.5 * spec.class_separation / (informative.len() as f64).sqrt()
    };

    let pairs = spec.planted_pairs();
    let affine: Vec<(f64, f64)> = pairs
        .iter()
        .map(|_| {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (sign * rng.random_range(0.5..2.0), rng.random_range(-3.0..3.0))
        })
        .collect();

    let mut labels: Vec<u8> = std::iter::repeat_n(1u8, spec.attack_count)
        .chain(std::iter::repeat_n(0u8, spec.benign_count))
        .collect();
    labels.shuffle(&mut rng);

    let mut matrix = Vec::with_capacity(n * width);
    for &label in &labels {
        let start = matrix.len();
        let sign = if label == 1 { 1.0 } else { -1.0 };
        for j in 0..base {
            let mean = if informative.contains(&j) { sign * shift } else { 0.0 };
            matrix.push(mean + bounded_noise(&mut rng));
        }
        for (&(src, _), &(a, b)) in pairs.iter().zip(&affine) {
            let x = matrix[start + src];
            matrix.push(a * x + b + DUPLICATE_NOISE * bounded_noise(&mut rng));
        }
    }

    let text = vec![labels
        .iter()
        .map(|&l| if l == 1 { ATTACK_LABEL } else { BENIGN_LABEL }.to_string())
        .collect()];
    let mut columns: Vec<(String, ColumnKind)> = spec
        .feature_names()
        .into_iter()
        .map(|name| (name, ColumnKind::Numeric))
        .collect();
    columns.push((LABEL_COLUMN.into(), ColumnKind::Meta));
    FlowDataset::from_parts(columns, n, matrix, text, Some(labels))
}

/// Wraps a dataset in the BoT-IoT column envelope: a leading `pkSeqID`,
/// `stime`, `ltime` and `proto`, so the usual ingest drops apply.
pub fn bot_iot_layout(ds: &FlowDataset) -> Result<FlowDataset> {
    let n = ds.row_count();
    let width = ds.feature_count();
    let mut columns: Vec<(String, ColumnKind)> = vec![
        ("pkSeqID".into(), ColumnKind::Numeric),
        ("stime".into(), ColumnKind::Numeric),
        ("ltime".into(), ColumnKind::Numeric),
        ("proto".into(), ColumnKind::CategoricalString),
    ];
    columns.extend(ds.columns().iter().map(|c| (c.name.clone(), c.kind)));
    let mut matrix = Vec::with_capacity(n * (width + 3));
    for i in 0..n {
        let stime = 1_528_000_000.0 + i as f64 * 0.25;
        matrix.extend_from_slice(&[(i + 1) as f64, stime, stime + 1.0]);
        matrix.extend_from_slice(ds.row(i));
    }
    let mut text = vec![(0..n)
        .map(|i| if i % 3 == 0 { "tcp" } else { "udp" }.to_string())
        .collect::<Vec<_>>()];
    text.extend(ds.text_columns().iter().cloned());
    FlowDataset::from_parts(columns, n, matrix, text, ds.labels().map(<[u8]>::to_vec))
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow_data::FlowDataset;

/// SMOTE settings. The minority class is always grown to the majority count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            seed: 0,
        }
    }
}

/// Where a synthetic row came from. Row indices refer to the input dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticOrigin {
    pub source: usize,
    pub neighbor: usize,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct SmoteOutcome {
    /// Input rows in their original order, then the synthetic rows.
    pub dataset: FlowDataset,
    pub synthetic: Vec<SyntheticOrigin>,
    pub minority_label: Option<u8>,
    /// Neighbour count after clamping to `minority - 1`.
    pub k_used: usize,
}

pub fn smote_resample(train: &FlowDataset, cfg: &SmoteConfig) -> Result<FlowDataset> {
    smote_resample_traced(train, cfg).map(|o| o.dataset)
}

/// SMOTE with the origin of every synthetic row recorded.
///
/// Each synthetic row is `m + u * (n - m)` for a random minority row `m`,
/// one of its `k` nearest minority neighbours `n` (Euclidean), and
/// `u ~ U[0, 1)`. Synthetic row `s` draws from its own ChaCha stream `s`,
/// so the output does not depend on thread count.
pub fn smote_resample_traced(train: &FlowDataset, cfg: &SmoteConfig) -> Result<SmoteOutcome> {
    if cfg.k_neighbors == 0 {
        return Err(Error::InvalidConfig("k_neighbors must be at least 1".into()));
    }
    let labels = train.require_labels()?;
    let (benign, attack) = train.class_counts()?;
    if benign == attack {
        return Ok(SmoteOutcome {
            dataset: train.clone(),
            synthetic: Vec::new(),
            minority_label: None,
            k_used: 0,
        });
    }
    let (minority_label, minority_count, majority_count) = if benign < attack {
        (0u8, benign, attack)
    } else {
        (1u8, attack, benign)
    };
    if minority_count < 2 {
        return Err(Error::MinorityTooSmall(minority_count));
    }
    let k = if cfg.k_neighbors > minority_count - 1 {
        log::warn!(
            "k_neighbors={} exceeds minority size - 1; using k={}",
            cfg.k_neighbors,
            minority_count - 1
        );
        minority_count - 1
    } else {
        cfg.k_neighbors
    };

    let minority: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == minority_label)
        .map(|(i, _)| i)
        .collect();
    let neighbors = nearest_neighbors(train, &minority, k);

    let need = majority_count - minority_count;
    let width = train.feature_count();
    let synthetic: Vec<SyntheticOrigin> = (0..need)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(s as u64);
            let a = rng.random_range(0..minority.len());
            let b = neighbors[a][rng.random_range(0..k)];
            SyntheticOrigin {
                source: minority[a],
                neighbor: minority[b],
                gap: rng.random::<f64>(),
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(need * width);
    for origin in &synthetic {
        let m = train.row(origin.source);
        let n = train.row(origin.neighbor);
        rows.extend(m.iter().zip(n).map(|(&a, &b)| a + origin.gap * (b - a)));
    }
    let text_rows = train
        .text_columns()
        .iter()
        .map(|col| synthetic.iter().map(|o| col[o.source].clone()).collect())
        .collect();
    let mut dataset = train.clone();
    dataset.append_rows(&rows, text_rows, &vec![minority_label; need]);

    Ok(SmoteOutcome {
        dataset,
        synthetic,
        minority_label: Some(minority_label),
        k_used: k,
    })
}

/// For each minority row, positions (into `minority`) of its `k` nearest
/// other minority rows; ties go to the lower position.
fn nearest_neighbors(ds: &FlowDataset, minority: &[usize], k: usize) -> Vec<Vec<usize>> {
    minority
        .par_iter()
        .enumerate()
        .map(|(a, &row_a)| {
            let x = ds.row(row_a);
            let mut dists: Vec<(f64, usize)> = minority
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(b, &row_b)| {
                    let d = x
                        .iter()
                        .zip(ds.row(row_b))
                        .map(|(p, q)| (p - q) * (p - q))
                        .sum::<f64>();
                    (d, b)
                })
                .collect();
            let cmp = |l: &(f64, usize), r: &(f64, usize)| l.0.total_cmp(&r.0).then(l.1.cmp(&r.1));
            if k < dists.len() {
                dists.select_nth_unstable_by(k - 1, cmp);
                dists.truncate(k);
            }
            dists.sort_unstable_by(cmp);
            dists.into_iter().map(|(_, b)| b).collect()
        })
        .collect()
}

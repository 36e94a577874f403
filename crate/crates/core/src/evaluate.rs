//! Confusion counts, derived metrics, and wall-clock phase timing.
//!
//! The attack class (label 1) is the positive class. Precision, recall and
//! F1 are reported as 0 when their denominator is 0.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(pred: &[u8], truth: &[u8]) -> Result<ConfusionMatrix> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: pred.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &t) in pred.iter().zip(truth) {
        match (p != 0, t != 0) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Wall time of one named phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub label: String,
    pub seconds: f64,
}

/// Runs `thunk` and measures it with the monotonic clock.
pub fn time_phase<T>(label: &str, thunk: impl FnOnce() -> T) -> (T, PhaseTiming) {
    let start = Instant::now();
    let out = thunk();
    let timing = PhaseTiming {
        label: label.to_string(),
        seconds: start.elapsed().as_secs_f64(),
    };
    (out, timing)
}

/// Training-time figures that accompany the classification metrics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainTimings {
    pub train_seconds: f64,
    pub epoch_seconds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub train_seconds: f64,
    pub mean_epoch_seconds: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(cm: &ConfusionMatrix, timings: &TrainTimings) -> Result<Metrics> {
    let n = cm.total();
    if n == 0 {
        return Err(Error::Empty);
    }
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let mean_epoch_seconds = if timings.epoch_seconds.is_empty() {
        0.0
    } else {
        timings.epoch_seconds.iter().sum::<f64>() / timings.epoch_seconds.len() as f64
    };
    Ok(Metrics {
        accuracy: ratio(cm.tp + cm.tn, n),
        precision,
        recall,
        f1,
        train_seconds: timings.train_seconds.max(0.0),
        mean_epoch_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_prediction() {
        let cm = confusion(&[1, 0, 1], &[1, 0, 1]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 2, fp: 0, tn: 1, fn_: 0 });
        let m = metrics(&cm, &TrainTimings::default()).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn total_error() {
        let cm = confusion(&[0, 1, 0], &[1, 0, 1]).unwrap();
        assert_eq!((cm.tp, cm.tn), (0, 0));
        let m = metrics(&cm, &TrainTimings::default()).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn arithmetic() {
        let cm = ConfusionMatrix { tp: 99, tn: 99, fp: 1, fn_: 1 };
        let m = metrics(&cm, &TrainTimings::default()).unwrap();
        assert!((m.accuracy - 0.99).abs() < 1e-15);
        let cm = ConfusionMatrix { tp: 3, tn: 5, fp: 0, fn_: 2 };
        assert_eq!(metrics(&cm, &TrainTimings::default()).unwrap().precision, 1.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(confusion(&[], &[]).unwrap(), ConfusionMatrix::default());
        assert!(metrics(&ConfusionMatrix::default(), &TrainTimings::default()).is_err());
        assert!(confusion(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn epoch_mean() {
        let t = TrainTimings {
            train_seconds: 3.5,
            epoch_seconds: vec![1.0, 2.0, 0.0],
        };
        let m = metrics(&ConfusionMatrix { tp: 1, ..Default::default() }, &t).unwrap();
        assert_eq!(m.mean_epoch_seconds, 1.0);
        assert_eq!(m.train_seconds, 3.5);
    }

    #[test]
    fn phases_keep_labels() {
        let (a, ta) = time_phase("selection", || 2 + 2);
        let (_, tb) = time_phase("training", || ());
        assert_eq!(a, 4);
        assert_eq!(ta.label, "selection");
        assert_eq!(tb.label, "training");
        assert!(ta.seconds >= 0.0 && tb.seconds >= 0.0);
    }

    #[test]
    fn serialized_names() {
        let json = serde_json::to_string(&ConfusionMatrix { tp: 1, fp: 2, tn: 3, fn_: 4 }).unwrap();
        assert_eq!(json, r#"{"tp":1,"fp":2,"tn":3,"fn":4}"#);
    }

    proptest! {
        #[test]
        fn bounded_and_permutation_invariant(
            pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200),
            rot in 0usize..200,
        ) {
            let p: Vec<u8> = pairs.iter().map(|x| u8::from(x.0)).collect();
            let t: Vec<u8> = pairs.iter().map(|x| u8::from(x.1)).collect();
            let cm = confusion(&p, &t).unwrap();
            prop_assert_eq!(cm.total(), pairs.len());
            let m = metrics(&cm, &TrainTimings::default()).unwrap();
            for v in [m.accuracy, m.precision, m.recall, m.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            let mut rotated = pairs.clone();
            rotated.rotate_left(rot % pairs.len());
            let rp: Vec<u8> = rotated.iter().map(|x| u8::from(x.0)).collect();
            let rt: Vec<u8> = rotated.iter().map(|x| u8::from(x.1)).collect();
            prop_assert_eq!(confusion(&rp, &rt).unwrap(), cm);
        }
    }
}

use rayon::prelude::*;

use super::{DroppedFeature, FeatureScore, SelectedFeatures, SelectionMethod};
use crate::error::{Error, Result};
use crate::flow_data::FlowDataset;

pub const DEFAULT_MAX_BINS: usize = 64;

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_unstable_by(f64::total_cmp);
    s
}

fn distinct_count(sorted: &[f64]) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    1 + sorted.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `min(64, distinct values)`, floored at 2.
pub fn default_bins(x: &[f64]) -> usize {
    distinct_count(&sorted(x)).clamp(2, DEFAULT_MAX_BINS)
}

/// Equal-frequency bin codes in `0..bins`.
///
/// With at most `bins` distinct values each value gets its own cell.
/// Otherwise a value lands in cell `floor(bins * below / n)`, where `below`
/// counts strictly smaller values, so ties share a cell and any strictly
/// increasing transform of `x` yields the same codes.
pub fn equal_frequency_bins(x: &[f64], bins: usize) -> Vec<usize> {
    let s = sorted(x);
    let n = s.len();
    let below = |v: f64| s.partition_point(|&u| u < v);
    if distinct_count(&s) <= bins {
        let mut uniq = s.clone();
        uniq.dedup();
        return x
            .iter()
            .map(|&v| uniq.partition_point(|&u| u < v))
            .collect();
    }
    x.iter()
        .map(|&v| (bins * below(v) / n).min(bins - 1))
        .collect()
}

/// Plug-in mutual information (nats) between two discrete codings.
pub fn mutual_information_codes(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut joint = vec![0usize; ka * kb];
    let mut pa = vec![0usize; ka];
    let mut pb = vec![0usize; kb];
    for (&i, &j) in a.iter().zip(b) {
        joint[i * kb + j] += 1;
        pa[i] += 1;
        pb[j] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            let c = joint[i * kb + j];
            if c == 0 {
                continue;
            }
            let c = c as f64;
            mi += (c / nf) * (c * nf / (pa[i] as f64 * pb[j] as f64)).ln();
        }
    }
    Ok(mi.max(0.0))
}

/// MI between a numeric feature, binned into at most `bins` equal-frequency
/// cells, and binary labels.
pub fn mutual_information(x: &[f64], labels: &[u8], bins: usize) -> Result<f64> {
    if x.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: labels.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidConfig(
            "mutual information needs at least two observations".into(),
        ));
    }
    if bins < 2 {
        return Err(Error::InvalidConfig("need at least two bins".into()));
    }
    let codes = equal_frequency_bins(x, bins);
    let label_codes: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
    mutual_information_codes(&codes, &label_codes)
}

/// Keeps the `k` features with the highest MI against the labels. Ties
/// rank by column order; `kept` stays in column order.
pub fn mi_rank_select(ds: &FlowDataset, k: usize) -> Result<SelectedFeatures> {
    let labels = ds.require_labels()?;
    let names = ds.feature_names();
    if k == 0 || k > names.len() {
        return Err(Error::InvalidConfig(format!(
            "k={k} must be in 1..={}",
            names.len()
        )));
    }
    let scores: Vec<f64> = ds
        .feature_vectors()
        .par_iter()
        .map(|col| mutual_information(col, labels, default_bins(col)))
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut chosen = order[..k].to_vec();
    chosen.sort_unstable();

    let dropped = order[k..]
        .iter()
        .map(|&j| DroppedFeature {
            name: names[j].clone(),
            score: scores[j],
            partner: None,
        })
        .collect();
    Ok(SelectedFeatures {
        method: SelectionMethod::MutualInformation,
        threshold_or_k: k as f64,
        kept: chosen.iter().map(|&j| names[j].clone()).collect(),
        scores: chosen.iter().map(|&j| scores[j]).collect(),
        dropped,
        ranking: order
            .iter()
            .map(|&j| FeatureScore {
                name: names[j].clone(),
                score: scores[j],
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_feature_has_zero_mi() {
        let labels = [0, 1, 0, 1, 1];
        assert_eq!(mutual_information(&[3.0; 5], &labels, 4).unwrap(), 0.0);
    }

    #[test]
    fn label_copy_balanced_is_ln2() {
        let labels: Vec<u8> = (0..1000).map(|i| (i % 2) as u8).collect();
        let x: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
        let mi = mutual_information(&x, &labels, 2).unwrap();
        assert!((mi - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn label_copy_imbalanced_is_label_entropy() {
        let labels: Vec<u8> = (0..1000).map(|i| u8::from(i % 10 == 0)).collect();
        let x: Vec<f64> = labels.iter().map(|&l| 5.0 * f64::from(l) - 1.0).collect();
        let mi = mutual_information(&x, &labels, default_bins(&x)).unwrap();
        let h = -(0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln());
        assert!((mi - h).abs() < 1e-12);
    }

    #[test]
    fn shuffled_labels_near_zero() {
        let n = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..n).map(|i| ((i * 7919) % 10_007) as f64).collect();
        let mut labels: Vec<u8> = x.iter().map(|&v| u8::from(v > 5000.0)).collect();
        assert!(mutual_information(&x, &labels, default_bins(&x)).unwrap() > 0.5);
        labels.shuffle(&mut rng);
        let mi = mutual_information(&x, &labels, default_bins(&x)).unwrap();
        assert!((0.0..0.01).contains(&mi), "mi={mi}");
    }

    #[test]
    fn bins_cover_range() {
        let x: Vec<f64> = (0..100).map(f64::from).collect();
        let codes = equal_frequency_bins(&x, 4);
        assert_eq!(codes[0], 0);
        assert_eq!(codes[99], 3);
        for b in 0..4 {
            assert_eq!(codes.iter().filter(|&&c| c == b).count(), 25);
        }
    }

    #[test]
    fn label_copy_ranks_first() {
        let n = 400;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let labels: Vec<u8> = (0..n).map(|i| u8::from(i % 3 == 0)).collect();
        let mut matrix = Vec::new();
        for &l in &labels {
            matrix.push(rand::Rng::random::<f64>(&mut rng));
            matrix.push(f64::from(l));
            matrix.push(rand::Rng::random::<f64>(&mut rng));
        }
        let ds = FlowDataset::from_features(
            vec!["noise_a".into(), "copy".into(), "noise_b".into()],
            matrix,
            Some(labels),
        )
        .unwrap();
        let sel = mi_rank_select(&ds, 2).unwrap();
        assert_eq!(sel.ranking[0].name, "copy");
        assert_eq!(sel.kept.len(), 2);
        assert!(sel.kept.contains(&"copy".to_string()));
        assert!(mi_rank_select(&ds, 4).is_err());
    }

    proptest! {
        #[test]
        fn mi_invariants(
            data in prop::collection::vec((-50.0f64..50.0, any::<bool>()), 2..200),
            bins in 2usize..20,
        ) {
            let x: Vec<f64> = data.iter().map(|d| d.0).collect();
            let y: Vec<u8> = data.iter().map(|d| u8::from(d.1)).collect();
            let mi = mutual_information(&x, &y, bins).unwrap();
            prop_assert!(mi >= 0.0);
            // exp is strictly increasing; bins depend only on ranks.
            let ex: Vec<f64> = x.iter().map(|v| (v / 10.0).exp()).collect();
            prop_assert_eq!(mutual_information(&ex, &y, bins).unwrap(), mi);
            let codes = equal_frequency_bins(&x, bins);
            let yc: Vec<usize> = y.iter().map(|&l| l as usize).collect();
            let ab = mutual_information_codes(&codes, &yc).unwrap();
            let ba = mutual_information_codes(&yc, &codes).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
        }

        #[test]
        fn rank_select_ignores_row_order(
            rows in prop::collection::vec((prop::array::uniform3(-5.0f64..5.0), any::<bool>()), 4..80),
            seed in any::<u64>(),
        ) {
            let build = |rows: &[([f64; 3], bool)]| {
                let matrix = rows.iter().flat_map(|r| r.0).collect();
                let labels = rows.iter().map(|r| u8::from(r.1)).collect();
                FlowDataset::from_features(
                    vec!["a".into(), "b".into(), "c".into()], matrix, Some(labels)).unwrap()
            };
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let a = mi_rank_select(&build(&rows), 2);
            let b = mi_rank_select(&build(&shuffled), 2);
            prop_assert_eq!(a.ok(), b.ok());
        }
    }
}

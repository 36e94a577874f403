use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ColumnKind, FlowDataset};
use crate::error::{Error, Result};

/// Row id and record start/end timestamps carry no flow behaviour.
pub const DEFAULT_DROP_COLUMNS: [&str; 3] = ["pkSeqID", "stime", "ltime"];

/// Removes the named columns and, with `drop_string_columns`, every
/// categorical-string column. Labels are untouched.
///
/// Names dropped by an earlier call are accepted and ignored, so repeating
/// a drop is a no-op. Any other unknown name is an error.
pub fn drop_columns<S: AsRef<str>>(
    ds: &FlowDataset,
    drop_names: &[S],
    drop_string_columns: bool,
) -> Result<FlowDataset> {
    for name in drop_names {
        let name = name.as_ref();
        if ds.column(name).is_none() && !ds.dropped_columns().iter().any(|d| d == name) {
            return Err(Error::MissingColumn(name.to_string()));
        }
    }
    let is_dropped = |name: &str, kind: ColumnKind| {
        drop_names.iter().any(|d| d.as_ref() == name)
            || (drop_string_columns && kind == ColumnKind::CategoricalString)
    };

    let keep_numeric: Vec<String> = ds
        .feature_columns()
        .filter(|c| !is_dropped(&c.name, c.kind))
        .map(|c| c.name.clone())
        .collect();
    let selected = ds.select_features(&keep_numeric)?;

    // select_features puts numeric columns first; restore file order.
    let mut columns = Vec::new();
    let mut text = Vec::new();
    let mut text_pos = 0usize;
    let mut dropped = ds.dropped_columns().to_vec();
    for c in ds.columns() {
        if is_dropped(&c.name, c.kind) {
            if !dropped.contains(&c.name) {
                dropped.push(c.name.clone());
            }
            if c.kind != ColumnKind::Numeric {
                text_pos += 1;
            }
            continue;
        }
        columns.push((c.name.clone(), c.kind));
        if c.kind != ColumnKind::Numeric {
            text.push(ds.text_columns()[text_pos].clone());
            text_pos += 1;
        }
    }
    let mut out = FlowDataset::from_parts(
        columns,
        ds.row_count(),
        selected.matrix().to_vec(),
        text,
        ds.labels().map(<[u8]>::to_vec),
    )?;
    out.set_dropped(dropped);
    Ok(out)
}

/// Splits rows per class so each class contributes `round(f * n_class)`
/// rows to the test side. Both sides keep the original row order.
pub fn stratified_split(
    ds: &FlowDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(FlowDataset, FlowDataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test fraction {test_fraction} not in (0, 1)"
        )));
    }
    let labels = ds.require_labels()?;
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l as usize].push(i);
    }
    if by_class.iter().any(Vec::is_empty) {
        return Err(Error::SingleClass);
    }
    for (label, rows) in by_class.iter().enumerate() {
        if rows.len() < 2 {
            return Err(Error::ClassTooSmall {
                label: label as u8,
                count: rows.len(),
                needed: 2,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(labels.len());
    let mut test = Vec::new();
    for rows in by_class.iter_mut() {
        rows.shuffle(&mut rng);
        let n_test = (test_fraction * rows.len() as f64).round() as usize;
        test.extend_from_slice(&rows[..n_test]);
        train.extend_from_slice(&rows[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

//! Dataset cache file: one line of JSON header, then a little-endian
//! binary payload (numeric columns as f64, column-major, followed by one
//! byte per label when labels are present).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ColumnKind, FlowDataset};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

pub const DATASET_FORMAT_VERSION: u32 = 1;
const FORMAT_NAME: &str = "ddosflow-dataset";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    format_version: u32,
    row_count: usize,
    columns: Vec<ColumnHeader>,
    has_labels: bool,
    #[serde(default)]
    dropped: Vec<String>,
    /// Values of non-numeric columns, in column order.
    text: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ColumnHeader {
    name: String,
    kind: ColumnKind,
}

pub fn write_dataset(ds: &FlowDataset, path: impl AsRef<Path>) -> Result<()> {
    let header = Header {
        format: FORMAT_NAME.into(),
        format_version: DATASET_FORMAT_VERSION,
        row_count: ds.row_count(),
        columns: ds
            .columns()
            .iter()
            .map(|c| ColumnHeader {
                name: c.name.clone(),
                kind: c.kind,
            })
            .collect(),
        has_labels: ds.labels().is_some(),
        dropped: ds.dropped_columns().to_vec(),
        text: ds.text_columns().to_vec(),
    };
    let mut bytes = serde_json::to_vec(&header)?;
    bytes.push(b'\n');
    let width = ds.feature_count();
    bytes.reserve(ds.matrix().len() * 8 + ds.row_count());
    for j in 0..width {
        for i in 0..ds.row_count() {
            bytes.extend_from_slice(&ds.matrix()[i * width + j].to_le_bytes());
        }
    }
    if let Some(labels) = ds.labels() {
        bytes.extend_from_slice(labels);
    }
    write_atomic(path.as_ref(), &bytes)
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<FlowDataset> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("dataset header not terminated".into()))?;
    let header: Header = serde_json::from_slice(&bytes[..split])?;
    if header.format != FORMAT_NAME {
        return Err(Error::Format(format!("not a dataset file: {}", header.format)));
    }
    if header.format_version != DATASET_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported dataset format version {}",
            header.format_version
        )));
    }
    let rows = header.row_count;
    let width = header
        .columns
        .iter()
        .filter(|c| c.kind == ColumnKind::Numeric)
        .count();
    let payload = &bytes[split + 1..];
    let expected = rows * width * 8 + if header.has_labels { rows } else { 0 };
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, expected {expected}",
            payload.len()
        )));
    }
    let mut matrix = vec![0.0; rows * width];
    for (k, chunk) in payload[..rows * width * 8].chunks_exact(8).enumerate() {
        let (j, i) = (k / rows.max(1), k % rows.max(1));
        let mut buf = [0u8; 8];
        buf.copy_from_slice(chunk);
        matrix[i * width + j] = f64::from_le_bytes(buf);
    }
    let labels = header
        .has_labels
        .then(|| payload[rows * width * 8..].to_vec());
    let mut ds = FlowDataset::from_parts(
        header
            .columns
            .into_iter()
            .map(|c| (c.name, c.kind))
            .collect(),
        rows,
        matrix,
        header.text,
        labels,
    )?;
    ds.set_dropped(header.dropped);
    Ok(ds)
}

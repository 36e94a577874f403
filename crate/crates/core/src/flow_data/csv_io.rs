use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord};

use super::{ColumnKind, FlowDataset};
use crate::error::{Error, Result};

fn open_reader(path: &Path) -> Result<csv::Reader<BufReader<File>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file)))
}

fn line_of(record: &StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Reads a headered CSV of flow records.
///
/// Column kinds are inferred: a column is numeric when every cell parses as
/// a number, otherwise it is categorical. The label column is kept as a
/// meta column, and `labels[i]` is 1 where its value equals
/// `positive_label`. Files whose label column holds more than two distinct
/// values are rejected. Row errors name the 1-based line in the file.
pub fn parse_flow_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    positive_label: &str,
) -> Result<FlowDataset> {
    let path = path.as_ref();

    // Pass 1: shape checks and kind inference.
    let mut reader = open_reader(path)?;
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let width = headers.len();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingColumn(label_column.to_string()))?;
    let mut numeric = vec![true; width];
    let mut label_values: Vec<String> = Vec::new();
    let mut rows = 0usize;
    let mut record = StringRecord::new();
    while reader.read_record(&mut record)? {
        let line = line_of(&record);
        if record.len() != width {
            return Err(Error::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    line,
                    column: headers[j].clone(),
                });
            }
            if j == label_idx {
                if !label_values.iter().any(|v| v == cell) {
                    label_values.push(cell.to_string());
                    if label_values.len() > 2 {
                        return Err(Error::NotBinary {
                            column: label_column.to_string(),
                            first: label_values[0].clone(),
                            second: label_values[1].clone(),
                            third: label_values[2].clone(),
                        });
                    }
                }
                continue;
            }
            if numeric[j] {
                match cell.parse::<f64>() {
                    Ok(v) if !v.is_finite() => {
                        return Err(Error::NonFinite {
                            line,
                            column: headers[j].clone(),
                        })
                    }
                    Ok(_) => {}
                    Err(_) => numeric[j] = false,
                }
            }
        }
        rows += 1;
    }

    let kinds: Vec<ColumnKind> = (0..width)
        .map(|j| {
            if j == label_idx {
                ColumnKind::Meta
            } else if numeric[j] {
                ColumnKind::Numeric
            } else {
                ColumnKind::CategoricalString
            }
        })
        .collect();
    let numeric_cols: Vec<usize> = (0..width)
        .filter(|&j| kinds[j] == ColumnKind::Numeric)
        .collect();
    let text_cols: Vec<usize> = (0..width)
        .filter(|&j| kinds[j] != ColumnKind::Numeric)
        .collect();

    // Pass 2: fill.
    let mut reader = open_reader(path)?;
    let mut matrix = Vec::with_capacity(rows * numeric_cols.len());
    let mut text: Vec<Vec<String>> = vec![Vec::with_capacity(rows); text_cols.len()];
    let mut labels = Vec::with_capacity(rows);
    while reader.read_record(&mut record)? {
        for &j in &numeric_cols {
            // Parse cannot fail: pass 1 checked every cell.
            matrix.push(record[j].trim().parse::<f64>().unwrap_or(f64::NAN));
        }
        for (t, &j) in text_cols.iter().enumerate() {
            text[t].push(record[j].trim().to_string());
        }
        labels.push(u8::from(record[label_idx].trim() == positive_label));
    }
    if labels.len() != rows {
        return Err(Error::Format(format!(
            "{} changed while reading",
            path.display()
        )));
    }

    FlowDataset::from_parts(
        headers.into_iter().zip(kinds).collect(),
        rows,
        matrix,
        text,
        Some(labels),
    )
}

/// Writes every column in column order. Numbers use the shortest
/// representation that parses back to the same bits.
pub fn write_flow_csv(ds: &FlowDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(ds.columns().iter().map(|c| c.name.as_str()))?;

    let mut numeric_pos = Vec::with_capacity(ds.columns().len());
    let (mut n, mut t) = (0usize, 0usize);
    for c in ds.columns() {
        if c.kind == ColumnKind::Numeric {
            numeric_pos.push(Slot::Numeric(n));
            n += 1;
        } else {
            numeric_pos.push(Slot::Text(t));
            t += 1;
        }
    }
    let text = ds.text_columns();
    let mut cells: Vec<String> = Vec::with_capacity(numeric_pos.len());
    for (i, row) in (0..ds.row_count()).map(|i| (i, ds.row(i))) {
        cells.clear();
        for slot in &numeric_pos {
            cells.push(match *slot {
                Slot::Numeric(j) => format!("{}", row[j]),
                Slot::Text(j) => text[j][i].clone(),
            });
        }
        writer.write_record(&cells)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

enum Slot {
    Numeric(usize),
    Text(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn csv_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_row_file() {
        let f = csv_file("pkSeqID,bytes,category\n1,100,DDoS\n2,250.5,Normal\n3,70,DDoS\n");
        let ds = parse_flow_csv(f.path(), "category", "DDoS").unwrap();
        assert_eq!(ds.row_count(), 3);
        assert_eq!(ds.labels().unwrap(), &[1, 0, 1]);
        assert_eq!(ds.feature_names(), vec!["pkSeqID", "bytes"]);
        assert_eq!(ds.column("category").unwrap().kind, ColumnKind::Meta);
        assert_eq!(ds.feature_values(1), vec![100.0, 250.5, 70.0]);
    }

    #[test]
    fn string_columns_are_categorical() {
        let f = csv_file("proto,saddr,bytes,category\ntcp,10.0.0.1,5,DDoS\nudp,10.0.0.2,6,Normal\n");
        let ds = parse_flow_csv(f.path(), "category", "DDoS").unwrap();
        assert_eq!(ds.column("proto").unwrap().kind, ColumnKind::CategoricalString);
        assert_eq!(ds.column("saddr").unwrap().kind, ColumnKind::CategoricalString);
        assert_eq!(ds.feature_count(), 1);
    }

    #[test]
    fn missing_cell_names_the_line() {
        let f = csv_file("a,b,category\n1,2,DDoS\n3,,Normal\n");
        match parse_flow_csv(f.path(), "category", "DDoS") {
            Err(Error::MissingValue { line, column }) => {
                assert_eq!(line, 3);
                assert_eq!(column, "b");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_row_names_the_line() {
        let f = csv_file("a,b,category\n1,2,DDoS\n3,Normal\n");
        match parse_flow_csv(f.path(), "category", "DDoS") {
            Err(Error::RaggedRow { line, expected, found }) => {
                assert_eq!((line, expected, found), (3, 3, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_label_column() {
        let f = csv_file("a,b\n1,2\n");
        assert!(matches!(
            parse_flow_csv(f.path(), "category", "DDoS"),
            Err(Error::MissingColumn(_))
        ));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            parse_flow_csv("/nonexistent/flows.csv", "category", "DDoS"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn multiclass_rejected() {
        let f = csv_file("a,category\n1,DDoS\n2,Normal\n3,Theft\n");
        assert!(matches!(
            parse_flow_csv(f.path(), "category", "DDoS"),
            Err(Error::NotBinary { .. })
        ));
    }

    #[test]
    fn nan_rejected() {
        let f = csv_file("a,category\nNaN,DDoS\n");
        assert!(matches!(
            parse_flow_csv(f.path(), "category", "DDoS"),
            Err(Error::NonFinite { line: 2, .. })
        ));
    }

    #[test]
    fn write_then_parse_is_lossless() {
        let f = csv_file("a,proto,category\n0.1,tcp,DDoS\n1e-300,udp,Normal\n");
        let ds = parse_flow_csv(f.path(), "category", "DDoS").unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_flow_csv(&ds, out.path()).unwrap();
        let back = parse_flow_csv(out.path(), "category", "DDoS").unwrap();
        assert_eq!(ds, back);
    }
}

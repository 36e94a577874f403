use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::flow_data::{ColumnKind, FlowDataset};

/// Replaces a categorical-string column with one 0/1 indicator column per
/// distinct value, named `column=value` and ordered lexicographically.
pub fn one_hot_encode(ds: &FlowDataset, column: &str) -> Result<FlowDataset> {
    let target = ds
        .column(column)
        .ok_or_else(|| Error::MissingColumn(column.to_string()))?;
    if target.kind != ColumnKind::CategoricalString {
        return Err(Error::WrongColumnKind {
            column: column.to_string(),
            expected: ColumnKind::CategoricalString.as_str(),
            actual: target.kind.as_str(),
        });
    }
    let values = ds.text_values(column).expect("categorical column has text");
    let distinct: Vec<&str> = values
        .iter()
        .map(String::as_str)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    enum Source {
        Feature(usize),
        Indicator(usize),
    }
    let mut columns = Vec::new();
    let mut sources = Vec::new();
    let mut text = Vec::new();
    let mut feature = 0usize;
    for c in ds.columns() {
        match c.kind {
            ColumnKind::Numeric => {
                columns.push((c.name.clone(), c.kind));
                sources.push(Source::Feature(feature));
                feature += 1;
            }
            _ if c.name == column => {
                for (v, value) in distinct.iter().enumerate() {
                    columns.push((format!("{column}={value}"), ColumnKind::Numeric));
                    sources.push(Source::Indicator(v));
                }
            }
            _ => {
                columns.push((c.name.clone(), c.kind));
                text.push(ds.text_values(&c.name).expect("text column").to_vec());
            }
        }
    }

    let mut matrix = Vec::with_capacity(ds.row_count() * sources.len());
    for (i, value) in values.iter().enumerate() {
        let row = ds.row(i);
        let hot = distinct.binary_search(&value.as_str()).expect("value is distinct");
        for src in &sources {
            matrix.push(match *src {
                Source::Feature(j) => row[j],
                Source::Indicator(v) => f64::from(u8::from(v == hot)),
            });
        }
    }
    let mut out = FlowDataset::from_parts(
        columns,
        ds.row_count(),
        matrix,
        text,
        ds.labels().map(<[u8]>::to_vec),
    )?;
    out.set_dropped(ds.dropped_columns().to_vec());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_proto(protos: &[&str]) -> FlowDataset {
        let n = protos.len();
        FlowDataset::from_parts(
            vec![
                ("bytes".into(), ColumnKind::Numeric),
                ("proto".into(), ColumnKind::CategoricalString),
                ("pkts".into(), ColumnKind::Numeric),
            ],
            n,
            (0..2 * n).map(|v| v as f64).collect(),
            vec![protos.iter().map(|s| s.to_string()).collect()],
            None,
        )
        .unwrap()
    }

    #[test]
    fn tcp_udp_indicators() {
        let ds = one_hot_encode(&with_proto(&["udp", "tcp", "udp"]), "proto").unwrap();
        assert_eq!(ds.feature_names(), vec!["bytes", "proto=tcp", "proto=udp", "pkts"]);
        assert_eq!(ds.row(0), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(ds.row(1), &[2.0, 1.0, 0.0, 3.0]);
        for i in 0..3 {
            assert_eq!(ds.row(i)[1] + ds.row(i)[2], 1.0);
        }
    }

    #[test]
    fn single_value_gives_ones() {
        let ds = one_hot_encode(&with_proto(&["icmp", "icmp"]), "proto").unwrap();
        assert_eq!(ds.feature_values(1), vec![1.0, 1.0]);
        assert_eq!(ds.feature_count(), 3);
    }

    #[test]
    fn cardinality() {
        let ds = one_hot_encode(&with_proto(&["a", "b", "c", "b", "d"]), "proto").unwrap();
        assert_eq!(ds.feature_count(), 2 + 4);
    }

    #[test]
    fn numeric_column_rejected() {
        assert!(matches!(
            one_hot_encode(&with_proto(&["a"]), "bytes"),
            Err(Error::WrongColumnKind { .. })
        ));
    }
}

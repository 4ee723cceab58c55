// SPDX-License-Identifier: Apache-2.0

//! Time-series datasets and CSV ingestion.

use serde::{Deserialize, Serialize};

use crate::error::DatasetError;

/// A named column of 64-bit floats. `NaN` marks a missing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub values: Vec<f64>,
}

/// Timestamp-indexed table of feature columns with optional binary labels.
///
/// All columns share the same length `n >= 1`. Labels, when present, are 0 or 1
/// with 1 marking an outlier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesDataset {
    name: String,
    timestamps: Vec<i64>,
    features: Vec<Feature>,
    labels: Option<Vec<u8>>,
}

impl TimeSeriesDataset {
    /// Builds a dataset, checking the shape invariants.
    pub fn new(
        name: impl Into<String>,
        timestamps: Vec<i64>,
        features: Vec<Feature>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self, DatasetError> {
        let n = timestamps.len();
        if n == 0 {
            return Err(DatasetError::EmptyInput);
        }
        if features.is_empty() {
            return Err(DatasetError::NoFeatures);
        }
        if let Some(f) = features.iter().find(|f| f.values.len() != n) {
            return Err(DatasetError::RaggedRows {
                row: f.values.len().min(n),
                expected: n,
                found: f.values.len(),
            });
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(DatasetError::RaggedRows {
                    row: labels.len().min(n),
                    expected: n,
                    found: labels.len(),
                });
            }
            if let Some(pos) = labels.iter().position(|&l| l > 1) {
                return Err(DatasetError::BadTargetIndex {
                    index: pos,
                    reason: format!("label {} at row {pos} is not 0 or 1", labels[pos]),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            timestamps,
            features,
            labels,
        })
    }

    /// Dataset with ordinal timestamps `0..n` and no labels.
    pub fn from_columns(
        name: impl Into<String>,
        columns: Vec<(String, Vec<f64>)>,
    ) -> Result<Self, DatasetError> {
        let n = columns.first().map_or(0, |(_, v)| v.len());
        let features = columns
            .into_iter()
            .map(|(name, values)| Feature { name, values })
            .collect();
        Self::new(name, (0..n as i64).collect(), features, None)
    }

    pub fn with_labels(self, labels: Vec<u8>) -> Result<Self, DatasetError> {
        Self::new(self.name, self.timestamps, self.features, Some(labels))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, name: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    /// New dataset made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            timestamps: rows.iter().map(|&r| self.timestamps[r]).collect(),
            features: self
                .features
                .iter()
                .map(|f| Feature {
                    name: f.name.clone(),
                    values: rows.iter().map(|&r| f.values[r]).collect(),
                })
                .collect(),
            labels: self.labels.as_ref().map(|l| rows.iter().map(|&r| l[r]).collect()),
        }
    }

    /// Same dataset with every feature column replaced through `f`.
    pub fn map_features<E>(&self, mut f: impl FnMut(&Feature) -> Result<Vec<f64>, E>) -> Result<Self, E> {
        let features = self
            .features
            .iter()
            .map(|feat| {
                Ok(Feature {
                    name: feat.name.clone(),
                    values: f(feat)?,
                })
            })
            .collect::<Result<Vec<_>, E>>()?;
        Ok(Self {
            features,
            ..self.clone()
        })
    }
}

impl TimeSeriesDataset {
    /// CSV text with a `timestamp` column first, the features, then a `label`
    /// column when labels are present (at index `features().len() + 1`).
    /// `NaN` is written as an empty cell.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["timestamp".to_string()];
        header.extend(self.feature_names());
        if self.labels.is_some() {
            header.push("label".into());
        }
        w.write_record(&header).expect("write to memory");
        for i in 0..self.len() {
            let mut row = vec![self.timestamps[i].to_string()];
            row.extend(self.features.iter().map(|f| {
                let v = f.values[i];
                if v.is_nan() {
                    String::new()
                } else {
                    v.to_string()
                }
            }));
            if let Some(l) = &self.labels {
                row.push(l[i].to_string());
            }
            w.write_record(&row).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }
}

/// Parses CSV text into a dataset.
///
/// `target_index` addresses a CSV column whose values become the labels. The
/// timestamp column is `timestamp_column` if given, otherwise a column named
/// `timestamp`, otherwise timestamps are the ordinals `0..n`. Every other column
/// becomes a feature; empty cells are read as `NaN`.
pub fn generate_dataset(
    csv_text: &str,
    target_index: Option<usize>,
    timestamp_column: Option<usize>,
) -> Result<TimeSeriesDataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(csv_text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DatasetError::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let width = headers.len();

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DatasetError::Csv(e.to_string()))?;
        if record.len() != width {
            // Tolerate a lone empty trailing line.
            if record.len() == 1 && record.get(0).is_some_and(|c| c.trim().is_empty()) {
                continue;
            }
            return Err(DatasetError::RaggedRows {
                row: i,
                expected: width,
                found: record.len(),
            });
        }
        rows.push(record);
    }
    if rows.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    let n = rows.len();

    if let Some(t) = target_index {
        if t >= width {
            return Err(DatasetError::BadTargetIndex {
                index: t,
                reason: format!("file has {width} columns"),
            });
        }
    }
    let ts_col = match timestamp_column {
        Some(c) if c >= width => {
            return Err(DatasetError::BadTimestampColumn {
                index: c,
                reason: format!("file has {width} columns"),
            })
        }
        Some(c) if Some(c) == target_index => {
            return Err(DatasetError::BadTimestampColumn {
                index: c,
                reason: "timestamp column is also the target".into(),
            })
        }
        Some(c) => Some(c),
        None => headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case("timestamp"))
            .filter(|&c| Some(c) != target_index),
    };

    let labels = target_index
        .map(|t| {
            rows.iter()
                .enumerate()
                .map(|(r, rec)| {
                    let cell = rec.get(t).unwrap_or("").trim();
                    match cell.parse::<f64>() {
                        Ok(0.0) => Ok(0u8),
                        Ok(1.0) => Ok(1u8),
                        _ => Err(DatasetError::BadTargetIndex {
                            index: t,
                            reason: format!("value {cell:?} at row {r} is not 0 or 1"),
                        }),
                    }
                })
                .collect::<Result<Vec<u8>, _>>()
        })
        .transpose()?;

    let timestamps = match ts_col {
        Some(c) => rows
            .iter()
            .enumerate()
            .map(|(r, rec)| {
                parse_timestamp(rec.get(c).unwrap_or("")).ok_or_else(|| DatasetError::NonNumericCell {
                    row: r,
                    column: headers[c].clone(),
                    value: rec.get(c).unwrap_or("").to_string(),
                })
            })
            .collect::<Result<Vec<i64>, _>>()?,
        None => (0..n as i64).collect(),
    };

    let mut features = Vec::new();
    for (c, header) in headers.iter().enumerate() {
        if Some(c) == target_index || Some(c) == ts_col {
            continue;
        }
        let values = rows
            .iter()
            .enumerate()
            .map(|(r, rec)| {
                let cell = rec.get(c).unwrap_or("").trim();
                if cell.is_empty() {
                    return Ok(f64::NAN);
                }
                cell.parse::<f64>().map_err(|_| DatasetError::NonNumericCell {
                    row: r,
                    column: header.clone(),
                    value: cell.to_string(),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        features.push(Feature {
            name: header.clone(),
            values,
        });
    }

    TimeSeriesDataset::new("dataset", timestamps, features, labels)
}

fn parse_timestamp(cell: &str) -> Option<i64> {
    let cell = cell.trim();
    if let Ok(v) = cell.parse::<i64>() {
        return Some(v);
    }
    // Integral floats such as "1.0" are accepted.
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15)
        .map(|v| v as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_column_file_with_target() {
        let ds = generate_dataset("timestamp,value,label\n1,5.0,0\n2,6.0,1\n", Some(2), None).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.feature_names(), vec!["value"]);
        assert_eq!(ds.labels(), Some(&[0u8, 1][..]));
        assert_eq!(ds.timestamps(), &[1, 2]);
    }

    #[test]
    fn target_out_of_range() {
        let err = generate_dataset("timestamp,value,label\n1,5.0,0\n2,6.0,1\n", Some(7), None).unwrap_err();
        assert_eq!(err.name(), "BadTargetIndex");
    }

    #[test]
    fn non_binary_target() {
        let err = generate_dataset("timestamp,value,label\n1,5.0,0\n2,6.0,2\n", Some(2), None).unwrap_err();
        assert_eq!(err.name(), "BadTargetIndex");
    }

    #[test]
    fn four_columns_two_features_in_order() {
        let ds = generate_dataset(
            "timestamp,a,b,anomaly\n10,1,2,0\n20,3,4,0\n30,5,6,1\n",
            Some(3),
            None,
        )
        .unwrap();
        assert_eq!(ds.feature_names(), vec!["a", "b"]);
        assert_eq!(ds.feature("b").unwrap().values, vec![2.0, 4.0, 6.0]);
    }

    #[test]
    fn ordinal_timestamps_without_timestamp_column() {
        let ds = generate_dataset("x,y\n1,2\n3,4\n5,6\n", None, None).unwrap();
        assert_eq!(ds.timestamps(), &[0, 1, 2]);
        assert_eq!(ds.features().len(), 2);
        assert!(!ds.has_labels());
    }

    #[test]
    fn empty_cell_is_nan() {
        // Blank lines are skipped by the reader.
        let ds = generate_dataset("v\n1\n\n3\n", None, None).unwrap();
        assert_eq!(ds.len(), 2);
        let ds = generate_dataset("t,v\n0,1\n1,\n2,3\n", None, Some(0)).unwrap();
        assert!(ds.features()[0].values[1].is_nan());
    }

    #[test]
    fn errors() {
        assert_eq!(
            generate_dataset("a,b\n", None, None).unwrap_err(),
            DatasetError::EmptyInput
        );
        let err = generate_dataset("a,b\n1,x\n", None, None).unwrap_err();
        assert_eq!(
            err,
            DatasetError::NonNumericCell {
                row: 0,
                column: "b".into(),
                value: "x".into()
            }
        );
        let err = generate_dataset("a,b\n1,2\n1,2,3\n", None, None).unwrap_err();
        assert_eq!(err.name(), "RaggedRows");
    }

    #[test]
    fn quoted_fields() {
        let ds = generate_dataset("\"timestamp\",\"v, w\"\n1,\"2.5\"\n", None, None).unwrap();
        assert_eq!(ds.feature_names(), vec!["v, w"]);
        assert_eq!(ds.features()[0].values, vec![2.5]);
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Values passed between pipeline steps.
//!
//! Every value is anchored to a [`Series`]: the row set produced by the last
//! row-level data-processing step. Each series row remembers its *origin*, the
//! row index in the dataset handed to the pipeline, so train/test masks and
//! ground truth stay attached through reordering and deduplication. Tables that
//! are derived per window carry a `positions` map from table row to series row
//! (the window start).

use std::sync::Arc;

use serde::Serialize;

use crate::dataset::TimeSeriesDataset;

/// Row set of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub origins: Vec<usize>,
    pub timestamps: Vec<i64>,
    pub truth: Option<Vec<u8>>,
}

impl Series {
    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Columnar table whose rows map onto series rows through `positions`
/// (strictly increasing).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub series: Arc<Series>,
    pub positions: Vec<usize>,
    pub columns: Vec<Column>,
}

impl Table {
    pub fn from_dataset(ds: &TimeSeriesDataset) -> Self {
        let n = ds.len();
        Self {
            series: Arc::new(Series {
                origins: (0..n).collect(),
                timestamps: ds.timestamps().to_vec(),
                truth: ds.labels().map(<[u8]>::to_vec),
            }),
            positions: (0..n).collect(),
            columns: ds
                .features()
                .iter()
                .map(|f| Column {
                    name: f.name.clone(),
                    values: f.values.clone(),
                })
                .collect(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.positions.len()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Row-major copy of the table.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows())
            .map(|r| self.columns.iter().map(|c| c.values[r]).collect())
            .collect()
    }

    /// Origin (input dataset row) of each table row.
    pub fn origins(&self) -> impl Iterator<Item = usize> + '_ {
        self.positions.iter().map(|&p| self.series.origins[p])
    }

    /// Same rows with new columns.
    pub fn with_columns(&self, columns: Vec<Column>) -> Self {
        Self {
            series: Arc::clone(&self.series),
            positions: self.positions.clone(),
            columns,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows(), self.columns.len())
    }
}

/// Per-series-row anomaly scores; higher is more anomalous, `NaN` where a
/// detector produced no score.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyScores {
    pub series: Arc<Series>,
    pub values: Vec<f64>,
}

impl AnomalyScores {
    /// Spreads per-row scores of `table` onto its series, leaving uncovered rows `NaN`.
    pub fn from_table_rows(table: &Table, row_scores: &[f64]) -> Self {
        let mut values = vec![f64::NAN; table.series.len()];
        for (&p, &s) in table.positions.iter().zip(row_scores) {
            values[p] = s;
        }
        Self {
            series: Arc::clone(&table.series),
            values,
        }
    }
}

/// Per-series-row predicted labels (1 = outlier).
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyLabels {
    pub series: Arc<Series>,
    pub values: Vec<u8>,
}

/// What a step produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ValueKind {
    Table,
    Scores,
    Labels,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Table(Table),
    Scores(AnomalyScores),
    Labels(AnomalyLabels),
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Self::Table(_) => ValueKind::Table,
            Self::Scores(_) => ValueKind::Scores,
            Self::Labels(_) => ValueKind::Labels,
        }
    }

    /// `(rows, columns)`; scores and labels are one column over their series.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Self::Table(t) => t.shape(),
            Self::Scores(s) => (s.values.len(), 1),
            Self::Labels(l) => (l.values.len(), 1),
        }
    }

    pub fn series(&self) -> &Arc<Series> {
        match self {
            Self::Table(t) => &t.series,
            Self::Scores(s) => &s.series,
            Self::Labels(l) => &l.series,
        }
    }
}

/// Which input rows (by origin) fit-capable primitives may learn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainMask(Vec<bool>);

impl TrainMask {
    pub fn from_indices(n: usize, train: &[usize]) -> Self {
        let mut mask = vec![false; n];
        for &i in train {
            mask[i] = true;
        }
        Self(mask)
    }

    pub fn contains(&self, origin: usize) -> bool {
        self.0.get(origin).copied().unwrap_or(false)
    }
}

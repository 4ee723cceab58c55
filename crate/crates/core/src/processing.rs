// SPDX-License-Identifier: Apache-2.0

//! Data-processing and time-series-processing primitives.
//!
//! Column-level functions work on plain slices; the dataset-level wrappers
//! apply them to every feature column.

use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesDataset;
use crate::error::PrimitiveError;

/// Guard on zero variance.
pub const STD_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderPolicy {
    Sort,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuplicatePolicy {
    KeepFirst,
    Error,
}

/// Row order that makes `timestamps` strictly increasing.
///
/// Sorting is stable, so among duplicates the earliest row comes first and is
/// the one kept under [`DuplicatePolicy::KeepFirst`].
pub fn validated_row_order(
    timestamps: &[i64],
    order: OrderPolicy,
    duplicates: DuplicatePolicy,
) -> Result<Vec<usize>, PrimitiveError> {
    let mut rows: Vec<usize> = (0..timestamps.len()).collect();
    if let Some(r) = (1..timestamps.len()).find(|&r| timestamps[r] < timestamps[r - 1]) {
        match order {
            OrderPolicy::Error => return Err(PrimitiveError::UnsortedTimestamps { row: r }),
            OrderPolicy::Sort => rows.sort_by_key(|&r| timestamps[r]),
        }
    }
    let mut kept: Vec<usize> = Vec::with_capacity(rows.len());
    for r in rows {
        match kept.last() {
            Some(&prev) if timestamps[prev] == timestamps[r] => match duplicates {
                DuplicatePolicy::Error => {
                    return Err(PrimitiveError::DuplicateTimestamp {
                        timestamp: timestamps[r],
                    })
                }
                DuplicatePolicy::KeepFirst => {}
            },
            _ => kept.push(r),
        }
    }
    Ok(kept)
}

/// Reorders and deduplicates rows so timestamps are strictly increasing.
pub fn timestamp_validation(
    ds: &TimeSeriesDataset,
    order: OrderPolicy,
    duplicates: DuplicatePolicy,
) -> Result<TimeSeriesDataset, PrimitiveError> {
    let rows = validated_row_order(ds.timestamps(), order, duplicates)?;
    Ok(ds.select_rows(&rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputeStrategy {
    Mean,
    ForwardFill,
    Linear,
}

/// Fills `NaN` entries of one column.
///
/// `forward_fill` back-fills a leading gap from the first observation;
/// `linear` holds boundary gaps flat at the nearest observation.
pub fn impute_column(name: &str, x: &[f64], strategy: ImputeStrategy) -> Result<Vec<f64>, PrimitiveError> {
    let observed: Vec<usize> = (0..x.len()).filter(|&i| !x[i].is_nan()).collect();
    let (Some(&first), Some(&last)) = (observed.first(), observed.last()) else {
        return Err(PrimitiveError::AllMissingColumn {
            column: name.to_string(),
        });
    };
    let mut y = x.to_vec();
    match strategy {
        ImputeStrategy::Mean => {
            let mean = observed.iter().map(|&i| x[i]).sum::<f64>() / observed.len() as f64;
            y.iter_mut().filter(|v| v.is_nan()).for_each(|v| *v = mean);
        }
        ImputeStrategy::ForwardFill => {
            let mut last_seen = x[first];
            for v in y.iter_mut() {
                if v.is_nan() {
                    *v = last_seen;
                } else {
                    last_seen = *v;
                }
            }
        }
        ImputeStrategy::Linear => {
            y[..first].fill(x[first]);
            y[last + 1..].fill(x[last]);
            for pair in observed.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let span = (b - a) as f64;
                for (i, v) in y.iter_mut().enumerate().take(b).skip(a + 1) {
                    let w = (i - a) as f64 / span;
                    *v = x[a] + w * (x[b] - x[a]);
                }
            }
        }
    }
    Ok(y)
}

pub fn impute_missing(
    ds: &TimeSeriesDataset,
    strategy: ImputeStrategy,
) -> Result<TimeSeriesDataset, PrimitiveError> {
    ds.map_features(|f| impute_column(&f.name, &f.values, strategy))
}

/// Trend, seasonal and residual components of an additive decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<f64>,
}

/// Centered moving average of width `period`; a `2 x period` average when
/// `period` is even. `NaN` within `period / 2` of either edge.
pub fn centered_trend(x: &[f64], period: usize) -> Vec<f64> {
    let n = x.len();
    let half = period / 2;
    let mut trend = vec![f64::NAN; n];
    if n < 2 * half + 1 {
        return trend;
    }
    for (t, out) in trend.iter_mut().enumerate().take(n - half).skip(half) {
        *out = if period % 2 == 1 {
            x[t - half..=t + half].iter().sum::<f64>() / period as f64
        } else {
            let inner: f64 = x[t - half + 1..t + half].iter().sum();
            (0.5 * x[t - half] + inner + 0.5 * x[t + half]) / period as f64
        };
    }
    trend
}

/// Classical additive seasonal decomposition.
pub fn seasonal_decomposition(x: &[f64], period: i64) -> Result<Decomposition, PrimitiveError> {
    if period < 2 {
        return Err(PrimitiveError::NonPositivePeriod(period));
    }
    let period = period as usize;
    let n = x.len();
    if n < 2 * period {
        return Err(PrimitiveError::PeriodTooLarge { period, n });
    }
    let trend = centered_trend(x, period);

    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for t in 0..n {
        let d = x[t] - trend[t];
        if !d.is_nan() {
            sums[t % period] += d;
            counts[t % period] += 1;
        }
    }
    let phase_means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let centre = phase_means.iter().sum::<f64>() / period as f64;
    let seasonal: Vec<f64> = (0..n).map(|t| phase_means[t % period] - centre).collect();
    let residual = (0..n).map(|t| x[t] - trend[t] - seasonal[t]).collect();
    Ok(Decomposition {
        trend,
        seasonal,
        residual,
    })
}

/// Edge-truncated centered moving average: the mean over
/// `[t - w/2, t + w/2]` clipped to the series. Missing values are skipped.
pub fn moving_average(x: &[f64], window: i64) -> Result<Vec<f64>, PrimitiveError> {
    if window < 1 {
        return Err(PrimitiveError::NonPositiveWindow(window));
    }
    let half = window as usize / 2;
    let n = x.len();
    Ok((0..n)
        .map(|t| {
            let lo = t.saturating_sub(half);
            let hi = (t + half).min(n - 1);
            let (sum, count) = x[lo..=hi]
                .iter()
                .filter(|v| !v.is_nan())
                .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
            if count == 0 {
                f64::NAN
            } else {
                sum / count as f64
            }
        })
        .collect())
}

/// `order`-times repeated first difference; output length `n - order`.
pub fn difference(x: &[f64], order: usize) -> Result<Vec<f64>, PrimitiveError> {
    if order == 0 || x.len() <= order {
        return Err(PrimitiveError::OrderTooLarge { order, n: x.len() });
    }
    let mut y = x.to_vec();
    for _ in 0..order {
        y = y.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(y)
}

/// Per-column standardization statistics learned at fit time.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub fit_length: usize,
}

impl Standardizer {
    /// Population mean and standard deviation of each column, ignoring `NaN`.
    pub fn fit(columns: &[&[f64]]) -> Self {
        let mut means = Vec::with_capacity(columns.len());
        let mut stds = Vec::with_capacity(columns.len());
        for col in columns {
            let (mean, std) = mean_std(col);
            means.push(mean);
            stds.push(std);
        }
        Self {
            means,
            stds,
            fit_length: columns.first().map_or(0, |c| c.len()),
        }
    }

    pub fn transform_column(&self, index: usize, x: &[f64]) -> Vec<f64> {
        let mean = self.means[index];
        let scale = self.stds[index].max(STD_EPSILON);
        x.iter().map(|v| (v - mean) / scale).collect()
    }

    pub fn produce(&self, ds: &TimeSeriesDataset) -> Result<TimeSeriesDataset, PrimitiveError> {
        if ds.features().len() != self.means.len() {
            return Err(PrimitiveError::LengthMismatch {
                left: ds.features().len(),
                right: self.means.len(),
            });
        }
        let mut i = 0;
        ds.map_features(|f| {
            let y = self.transform_column(i, &f.values);
            i += 1;
            Ok(y)
        })
    }
}

pub fn standardize(ds: &TimeSeriesDataset) -> Standardizer {
    let cols: Vec<&[f64]> = ds.features().iter().map(|f| f.values.as_slice()).collect();
    Standardizer::fit(&cols)
}

/// Population mean and standard deviation over the non-`NaN` entries
/// (`NaN, NaN` when there are none).
pub fn mean_std(x: &[f64]) -> (f64, f64) {
    let observed = x.iter().filter(|v| !v.is_nan());
    let (sum, count) = observed.clone().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum / count as f64;
    let var = observed.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    (mean, var.sqrt())
}

/// Sliding windows over a column.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsequences {
    pub rows: Vec<Vec<f64>>,
    /// Start index of each row in the original column.
    pub starts: Vec<usize>,
}

pub fn segment_subsequences(x: &[f64], window: i64, stride: i64) -> Result<Subsequences, PrimitiveError> {
    if window < 1 {
        return Err(PrimitiveError::NonPositiveWindow(window));
    }
    if stride < 1 {
        return Err(PrimitiveError::NonPositiveStride(stride));
    }
    let (window, stride) = (window as usize, stride as usize);
    let n = x.len();
    if window > n {
        return Err(PrimitiveError::WindowTooLarge { window, n });
    }
    let starts: Vec<usize> = (0..=(n - window) / stride).map(|i| i * stride).collect();
    let rows = starts.iter().map(|&s| x[s..s + window].to_vec()).collect();
    Ok(Subsequences { rows, starts })
}

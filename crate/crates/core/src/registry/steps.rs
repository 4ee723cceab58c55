// SPDX-License-Identifier: Apache-2.0

//! Adapters running each primitive on pipeline values.

use std::collections::HashMap;
use std::sync::Arc;

use ndarray::Array2;

use super::Invocation;
use crate::detection::ar::{check_length, ArModel};
use crate::detection::{self, rules::apply_rules, IsolationForest};
use crate::error::PrimitiveError;
use crate::features::{self, FeatureTable};
use crate::frame::{AnomalyLabels, AnomalyScores, Column, Series, Table, Value};
use crate::processing::{self, DuplicatePolicy, ImputeStrategy, OrderPolicy, Standardizer};

type StepResult = Result<Value, PrimitiveError>;

fn value<'a>(inv: &'a Invocation<'_>, name: &str) -> Result<&'a Value, PrimitiveError> {
    inv.args
        .get(name)
        .copied()
        .ok_or_else(|| PrimitiveError::BadArgument {
            name: name.to_string(),
            reason: "missing".into(),
        })
}

fn table<'a>(inv: &'a Invocation<'_>, name: &str) -> Result<&'a Table, PrimitiveError> {
    match value(inv, name)? {
        Value::Table(t) => Ok(t),
        other => Err(PrimitiveError::BadArgument {
            name: name.to_string(),
            reason: format!("expected Table, got {:?}", other.kind()),
        }),
    }
}

/// Whether table row `r` may be used for fitting.
fn trains_on(inv: &Invocation<'_>, t: &Table, r: usize) -> bool {
    inv.train
        .is_none_or(|m| m.contains(t.series.origins[t.positions[r]]))
}

fn map_columns(t: &Table, mut f: impl FnMut(&Column) -> Result<Vec<f64>, PrimitiveError>) -> StepResult {
    let columns = t
        .columns
        .iter()
        .map(|c| {
            Ok(Column {
                name: c.name.clone(),
                values: f(c)?,
            })
        })
        .collect::<Result<Vec<_>, PrimitiveError>>()?;
    Ok(Value::Table(t.with_columns(columns)))
}

fn column<'a>(t: &'a Table, inv: &Invocation<'_>) -> Result<&'a [f64], PrimitiveError> {
    let index = inv.hyperparams.usize("column")?;
    t.columns
        .get(index)
        .map(|c| c.values.as_slice())
        .ok_or(PrimitiveError::ColumnOutOfRange {
            index,
            columns: t.columns.len(),
        })
}

pub(super) fn timestamp_validation(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let order = match inv.hyperparams.enumeration("order_policy")? {
        "error" => OrderPolicy::Error,
        _ => OrderPolicy::Sort,
    };
    let duplicates = match inv.hyperparams.enumeration("duplicate_policy")? {
        "error" => DuplicatePolicy::Error,
        _ => DuplicatePolicy::KeepFirst,
    };
    let timestamps: Vec<i64> = t.positions.iter().map(|&p| t.series.timestamps[p]).collect();
    let rows = processing::validated_row_order(&timestamps, order, duplicates)?;
    let pick = |r: &usize| t.positions[*r];
    let series = Series {
        origins: rows.iter().map(|r| t.series.origins[pick(r)]).collect(),
        timestamps: rows.iter().map(|r| t.series.timestamps[pick(r)]).collect(),
        truth: t
            .series
            .truth
            .as_ref()
            .map(|truth| rows.iter().map(|r| truth[pick(r)]).collect()),
    };
    Ok(Value::Table(Table {
        series: Arc::new(series),
        positions: (0..rows.len()).collect(),
        columns: t
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                values: rows.iter().map(|&r| c.values[r]).collect(),
            })
            .collect(),
    }))
}

pub(super) fn impute_missing(inv: &Invocation<'_>) -> StepResult {
    let strategy = match inv.hyperparams.enumeration("strategy")? {
        "mean" => ImputeStrategy::Mean,
        "forward_fill" => ImputeStrategy::ForwardFill,
        _ => ImputeStrategy::Linear,
    };
    map_columns(table(inv, "inputs")?, |c| {
        processing::impute_column(&c.name, &c.values, strategy)
    })
}

pub(super) fn column_select(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let wanted = inv.hyperparams.float_list("columns")?;
    if wanted.is_empty() {
        return Ok(Value::Table(t.clone()));
    }
    let columns = wanted
        .iter()
        .map(|&i| {
            if i.fract() != 0.0 {
                return Err(PrimitiveError::BadHyperparam {
                    name: "columns".into(),
                    reason: format!("{i} is not an integer index"),
                });
            }
            t.columns
                .get(i as usize)
                .cloned()
                .ok_or(PrimitiveError::ColumnOutOfRange {
                    index: i as usize,
                    columns: t.columns.len(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Value::Table(t.with_columns(columns)))
}

pub(super) fn seasonal_decomposition(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let period = inv.hyperparams.int("period")?;
    let components = inv.hyperparams.enumeration("output")? == "components";
    let mut columns = Vec::new();
    for c in &t.columns {
        let d = processing::seasonal_decomposition(&c.values, period)?;
        if components {
            columns.push(Column {
                name: format!("{}_trend", c.name),
                values: d.trend,
            });
            columns.push(Column {
                name: format!("{}_seasonal", c.name),
                values: d.seasonal,
            });
        }
        columns.push(Column {
            name: format!("{}_residual", c.name),
            values: d.residual,
        });
    }
    Ok(Value::Table(t.with_columns(columns)))
}

pub(super) fn moving_average(inv: &Invocation<'_>) -> StepResult {
    let window = inv.hyperparams.int("window")?;
    map_columns(table(inv, "inputs")?, |c| {
        processing::moving_average(&c.values, window)
    })
}

pub(super) fn difference(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let order = inv.hyperparams.usize("order")?;
    let columns = t
        .columns
        .iter()
        .map(|c| {
            Ok(Column {
                name: c.name.clone(),
                values: processing::difference(&c.values, order)?,
            })
        })
        .collect::<Result<Vec<_>, PrimitiveError>>()?;
    if t.n_rows() <= order {
        return Err(PrimitiveError::OrderTooLarge { order, n: t.n_rows() });
    }
    Ok(Value::Table(Table {
        series: Arc::clone(&t.series),
        positions: t.positions[order..].to_vec(),
        columns,
    }))
}

pub(super) fn standardize(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let train_rows: Vec<usize> = (0..t.n_rows()).filter(|&r| trains_on(inv, t, r)).collect();
    if train_rows.is_empty() {
        return Err(PrimitiveError::NoTrainingRows);
    }
    let fit_columns: Vec<Vec<f64>> = t
        .columns
        .iter()
        .map(|c| train_rows.iter().map(|&r| c.values[r]).collect())
        .collect();
    let refs: Vec<&[f64]> = fit_columns.iter().map(Vec::as_slice).collect();
    let fitted = Standardizer::fit(&refs);
    let mut i = 0;
    map_columns(t, |c| {
        let y = fitted.transform_column(i, &c.values);
        i += 1;
        Ok(y)
    })
}

pub(super) fn subsequence_segmentation(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let x = column(t, inv)?;
    let subs =
        processing::segment_subsequences(x, inv.hyperparams.int("window")?, inv.hyperparams.int("stride")?)?;
    let width = subs.rows.first().map_or(0, Vec::len);
    let columns = (0..width)
        .map(|k| Column {
            name: format!("t{k}"),
            values: subs.rows.iter().map(|r| r[k]).collect(),
        })
        .collect();
    Ok(Value::Table(Table {
        series: Arc::clone(&t.series),
        positions: subs.starts.iter().map(|&s| t.positions[s]).collect(),
        columns,
    }))
}

/// Runs a windowed feature extractor on every column and joins the results.
fn per_column_features(t: &Table, f: impl Fn(&[f64]) -> Result<FeatureTable, PrimitiveError>) -> StepResult {
    let mut columns = Vec::new();
    let mut starts = Vec::new();
    for c in &t.columns {
        let ft = f(&c.values)?;
        for (k, name) in ft.column_names.iter().enumerate() {
            columns.push(Column {
                name: format!("{}_{name}", c.name),
                values: ft.rows.iter().map(|r| r[k]).collect(),
            });
        }
        starts = ft.row_index_map;
    }
    Ok(Value::Table(Table {
        series: Arc::clone(&t.series),
        positions: starts.iter().map(|&s| t.positions[s]).collect(),
        columns,
    }))
}

pub(super) fn autocorrelation(inv: &Invocation<'_>) -> StepResult {
    let window = inv.hyperparams.int("window")?;
    let stride = inv.hyperparams.int("stride")?;
    let max_lag = inv.hyperparams.usize("max_lag")?;
    per_column_features(table(inv, "inputs")?, |x| {
        features::windowed_autocorrelation(x, window, stride, max_lag)
    })
}

pub(super) fn window_statistics(inv: &Invocation<'_>) -> StepResult {
    let window = inv.hyperparams.int("window")?;
    let stride = inv.hyperparams.int("stride")?;
    per_column_features(table(inv, "inputs")?, |x| {
        features::window_statistics(x, window, stride)
    })
}

pub(super) fn dft_magnitudes(inv: &Invocation<'_>) -> StepResult {
    let window = inv.hyperparams.int("window")?;
    let stride = inv.hyperparams.int("stride")?;
    let n_bins = inv.hyperparams.usize("n_bins")?;
    per_column_features(table(inv, "inputs")?, |x| {
        features::dft_magnitudes(x, window, stride, n_bins)
    })
}

pub(super) fn nmf(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let hp = inv.hyperparams;
    let rows = t.rows();
    let usable: Vec<usize> = (0..rows.len())
        .filter(|&r| rows[r].iter().all(|v| v.is_finite()))
        .collect();
    let width = t.columns.len();
    let mut v = Array2::from_shape_fn((usable.len(), width), |(i, j)| rows[usable[i]][j]);
    if hp.bool("shift")? {
        for mut col in v.columns_mut() {
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            if min < 0.0 {
                col.mapv_inplace(|x| x - min);
            }
        }
    }
    let fit = features::nmf_fit(
        &v,
        hp.usize("rank")?,
        hp.usize("max_iter")?,
        hp.float("tol")?,
        hp.usize("seed")? as u64,
    )?;
    let residuals = features::nmf_residual_features(&v, &fit.w, &fit.h);
    let mut values = vec![f64::NAN; rows.len()];
    for (&r, e) in usable.iter().zip(residuals) {
        values[r] = e;
    }
    Ok(Value::Table(t.with_columns(vec![Column {
        name: "nmf_residual".into(),
        values,
    }])))
}

pub(super) fn zscore(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let scores = detection::zscore_detector(column(t, inv)?)?;
    Ok(Value::Scores(AnomalyScores::from_table_rows(t, &scores)))
}

pub(super) fn iforest(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let rows = t.rows();
    let train: Vec<Vec<f64>> = (0..rows.len())
        .filter(|&r| trains_on(inv, t, r))
        .map(|r| rows[r].clone())
        .collect();
    let forest = IsolationForest::fit(
        &train,
        inv.hyperparams.usize("n_trees")?,
        inv.hyperparams.usize("subsample_size")?,
        inv.hyperparams.usize("seed")? as u64,
    )?;
    let scores = forest.score(&rows)?;
    Ok(Value::Scores(AnomalyScores::from_table_rows(t, &scores)))
}

pub(super) fn knn(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let scores = detection::knn_detector(&t.rows(), inv.hyperparams.usize("k")?)?;
    Ok(Value::Scores(AnomalyScores::from_table_rows(t, &scores)))
}

pub(super) fn ar_residual(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let x = column(t, inv)?;
    let order = inv.hyperparams.usize("order")?;
    check_length(x.len(), order)?;
    let model = match inv.train {
        Some(_) => ArModel::fit(x, order, |r| trains_on(inv, t, r))?,
        None => {
            let fraction = inv.hyperparams.float("train_fraction")?;
            let n_train = (fraction * x.len() as f64).ceil() as usize;
            ArModel::fit(x, order, |r| r < n_train)?
        }
    };
    Ok(Value::Scores(AnomalyScores::from_table_rows(
        t,
        &model.residuals(x),
    )))
}

pub(super) fn matrix_profile(inv: &Invocation<'_>) -> StepResult {
    let t = table(inv, "inputs")?;
    let profile = detection::matrix_profile_discord(column(t, inv)?, inv.hyperparams.usize("window")?)?;
    Ok(Value::Scores(AnomalyScores::from_table_rows(t, &profile)))
}

pub(super) fn threshold(inv: &Invocation<'_>) -> StepResult {
    let Value::Scores(scores) = value(inv, "inputs")? else {
        return Err(PrimitiveError::BadArgument {
            name: "inputs".into(),
            reason: "expected Scores".into(),
        });
    };
    let labels = detection::threshold_labels(&scores.values, inv.hyperparams.float("contamination")?)?;
    Ok(Value::Labels(AnomalyLabels {
        series: Arc::clone(&scores.series),
        values: labels,
    }))
}

pub(super) fn rule_based_filter(inv: &Invocation<'_>) -> StepResult {
    let Value::Labels(labels) = value(inv, "inputs")? else {
        return Err(PrimitiveError::BadArgument {
            name: "inputs".into(),
            reason: "expected Labels".into(),
        });
    };
    let data = table(inv, "data")?;
    // Rows are matched through their origin in the input dataset.
    let row_of: HashMap<usize, usize> = data.origins().enumerate().map(|(r, o)| (o, r)).collect();
    let names: Vec<&str> = data.columns.iter().map(|c| c.name.as_str()).collect();
    let series = &labels.series;
    let filtered = apply_rules(
        &labels.values,
        &series.timestamps,
        inv.hyperparams.rules("rules")?,
        &names,
        |feature, i| {
            let r = *row_of.get(&series.origins[i])?;
            let v = data.column(feature)?.values[r];
            (!v.is_nan()).then_some(v)
        },
    )?;
    Ok(Value::Labels(AnomalyLabels {
        series: Arc::clone(series),
        values: filtered,
    }))
}

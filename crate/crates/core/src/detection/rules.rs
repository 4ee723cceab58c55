// SPDX-License-Identifier: Apache-2.0

//! Rule-based reinforcement filter: human-authored rules that overwrite
//! predicted labels.

use serde_json::{json, Value as Json};

use crate::dataset::TimeSeriesDataset;
use crate::error::PrimitiveError;

/// Pseudo-feature naming the label being filtered.
pub const PREDICTION: &str = "prediction";

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// `lo <= v <= hi`
    InRange { lo: f64, hi: f64 },
    /// `v < lo || v > hi`
    OutsideRange { lo: f64, hi: f64 },
    /// `t0 <= timestamp <= t1`; ignores the rule's feature.
    TimeIn { t0: i64, t1: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    ForceNormal,
    ForceOutlier,
}

impl Action {
    fn label(self) -> u8 {
        match self {
            Self::ForceNormal => 0,
            Self::ForceOutlier => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    /// Column name, or `"prediction"` for the current label.
    pub feature: String,
    pub predicate: Predicate,
    pub action: Action,
}

impl Rule {
    pub fn check(&self) -> Result<(), String> {
        match self.predicate {
            Predicate::InRange { lo, hi } | Predicate::OutsideRange { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                    return Err(format!("bad range [{lo}, {hi}]"));
                }
            }
            Predicate::TimeIn { t0, t1 } if t0 > t1 => {
                return Err(format!("bad time range [{t0}, {t1}]"));
            }
            Predicate::TimeIn { .. } => {}
        }
        Ok(())
    }

    pub fn to_json(&self) -> Json {
        let (kind, args) = match self.predicate {
            Predicate::InRange { lo, hi } => ("in_range", json!([lo, hi])),
            Predicate::OutsideRange { lo, hi } => ("outside_range", json!([lo, hi])),
            Predicate::TimeIn { t0, t1 } => ("time_in", json!([t0, t1])),
        };
        json!({
            "feature": self.feature,
            "predicate": { "kind": kind, "args": args },
            "action": match self.action {
                Action::ForceNormal => "force_normal",
                Action::ForceOutlier => "force_outlier",
            },
        })
    }

    pub fn from_json(v: &Json) -> Result<Self, String> {
        let obj = v.as_object().ok_or("rule must be an object")?;
        if let Some(key) = obj
            .keys()
            .find(|k| !matches!(k.as_str(), "feature" | "predicate" | "action"))
        {
            return Err(format!("unknown rule field {key:?}"));
        }
        let feature = obj
            .get("feature")
            .and_then(Json::as_str)
            .unwrap_or(PREDICTION)
            .to_string();
        let pred = obj
            .get("predicate")
            .and_then(Json::as_object)
            .ok_or("rule needs a predicate object")?;
        let kind = pred
            .get("kind")
            .and_then(Json::as_str)
            .ok_or("predicate needs a kind")?;
        let args = pred
            .get("args")
            .and_then(Json::as_array)
            .filter(|a| a.len() == 2)
            .ok_or("predicate needs two args")?;
        let num = |i: usize| {
            args[i]
                .as_f64()
                .ok_or_else(|| format!("predicate arg {} is not a number", args[i]))
        };
        let int = |i: usize| {
            args[i]
                .as_i64()
                .ok_or_else(|| format!("time bound {} is not an integer", args[i]))
        };
        let predicate = match kind {
            "in_range" => Predicate::InRange {
                lo: num(0)?,
                hi: num(1)?,
            },
            "outside_range" => Predicate::OutsideRange {
                lo: num(0)?,
                hi: num(1)?,
            },
            "time_in" => Predicate::TimeIn {
                t0: int(0)?,
                t1: int(1)?,
            },
            other => return Err(format!("unknown predicate kind {other:?}")),
        };
        let action = match obj.get("action").and_then(Json::as_str) {
            Some("force_normal") => Action::ForceNormal,
            Some("force_outlier") => Action::ForceOutlier,
            other => return Err(format!("unknown action {other:?}")),
        };
        let rule = Self {
            feature,
            predicate,
            action,
        };
        rule.check()?;
        Ok(rule)
    }
}

/// Applies `rules` in order; for each row matching a rule's predicate the
/// label becomes the rule's action. Later rules win, and `"prediction"`
/// refers to the label as left by the preceding rules.
///
/// `value(feature, row)` yields a feature value, `None` when the row has none.
/// Missing or `NaN` values never match a range predicate.
pub fn apply_rules(
    labels: &[u8],
    timestamps: &[i64],
    rules: &[Rule],
    known_features: &[&str],
    value: impl Fn(&str, usize) -> Option<f64>,
) -> Result<Vec<u8>, PrimitiveError> {
    if labels.len() != timestamps.len() {
        return Err(PrimitiveError::LengthMismatch {
            left: labels.len(),
            right: timestamps.len(),
        });
    }
    for rule in rules {
        let time_only = matches!(rule.predicate, Predicate::TimeIn { .. });
        if !time_only && rule.feature != PREDICTION && !known_features.contains(&rule.feature.as_str()) {
            return Err(PrimitiveError::UnknownFeature(rule.feature.clone()));
        }
    }
    let mut out = labels.to_vec();
    for rule in rules {
        for i in 0..out.len() {
            let matched = match rule.predicate {
                Predicate::TimeIn { t0, t1 } => (t0..=t1).contains(&timestamps[i]),
                Predicate::InRange { lo, hi } | Predicate::OutsideRange { lo, hi } => {
                    let v = if rule.feature == PREDICTION {
                        Some(out[i] as f64)
                    } else {
                        value(&rule.feature, i)
                    };
                    match (v, &rule.predicate) {
                        (Some(v), Predicate::InRange { .. }) => lo <= v && v <= hi,
                        (Some(v), _) => v < lo || v > hi,
                        (None, _) => false,
                    }
                }
            };
            if matched {
                out[i] = rule.action.label();
            }
        }
    }
    Ok(out)
}

/// Applies `rules` to labels predicted for `ds`, row by row.
pub fn rule_based_filter(
    labels: &[u8],
    ds: &TimeSeriesDataset,
    rules: &[Rule],
) -> Result<Vec<u8>, PrimitiveError> {
    let names: Vec<&str> = ds.features().iter().map(|f| f.name.as_str()).collect();
    apply_rules(labels, ds.timestamps(), rules, &names, |name, i| {
        ds.feature(name).map(|f| f.values[i]).filter(|v| !v.is_nan())
    })
}

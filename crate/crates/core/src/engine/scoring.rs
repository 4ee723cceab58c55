// SPDX-License-Identifier: Apache-2.0

//! Precision, recall and F1, plain and point-adjusted.

use std::ops::Add;

use serde::Serialize;
use serde_json::{json, Value as Json};

use super::{EngineError, Metric};

/// Confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Counts {
    pub fn of(predicted: &[u8], truth: &[u8]) -> Self {
        let mut c = Counts::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p != 0, t != 0) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

/// Predictions with every true segment marked fully detected when any of its
/// points is predicted.
pub fn point_adjust(predicted: &[u8], truth: &[u8]) -> Vec<u8> {
    let mut out = predicted.to_vec();
    let mut i = 0;
    while i < truth.len() {
        if truth[i] == 0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < truth.len() && truth[i] != 0 {
            i += 1;
        }
        if predicted[start..i].iter().any(|&p| p != 0) {
            out[start..i].fill(1);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub primary_metric: Metric,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f1_point_adjusted: f64,
    pub counts: Counts,
}

impl ScoreReport {
    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::F1 => self.f1,
            Metric::F1PointAdjusted => self.f1_point_adjusted,
        }
    }

    /// Value of the primary metric.
    pub fn primary(&self) -> f64 {
        self.metric(self.primary_metric)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "primary_metric": self.primary_metric,
            "scores": {
                "precision": self.precision,
                "recall": self.recall,
                "f1": self.f1,
                "f1_pa": self.f1_point_adjusted,
            },
            "counts": self.counts,
        })
    }
}

pub fn score(predicted: &[u8], truth: &[u8], primary_metric: Metric) -> Result<ScoreReport, EngineError> {
    if predicted.len() != truth.len() {
        return Err(EngineError::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let counts = Counts::of(predicted, truth);
    let adjusted = Counts::of(&point_adjust(predicted, truth), truth);
    Ok(ScoreReport {
        primary_metric,
        precision: counts.precision(),
        recall: counts.recall(),
        f1: counts.f1(),
        f1_point_adjusted: adjusted.f1(),
        counts,
    })
}

// SPDX-License-Identifier: Apache-2.0

//! Time-ordered train/test splits.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitScheme {
    /// `k` contiguous test blocks; train is the complement.
    KFold(usize),
    /// The first `ceil(f * n)` rows train, the rest test.
    Holdout(f64),
}

impl SplitScheme {
    /// Checks that the scheme can split `n` rows.
    pub fn validate_for(&self, n: usize) -> Result<(), String> {
        make_splits(n, self, 0).map(|_| ()).map_err(|e| e.to_string())
    }
}

impl Default for SplitScheme {
    fn default() -> Self {
        Self::KFold(5)
    }
}

impl fmt::Display for SplitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::KFold(k) => write!(f, "kfold:{k}"),
            Self::Holdout(frac) => write!(f, "holdout:{frac}"),
        }
    }
}

/// Parses `kfold:<k>` or `holdout:<fraction>`.
impl FromStr for SplitScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad scheme {s:?} (expected kfold:<k> or holdout:<fraction>)");
        match s.split_once(':') {
            Some(("kfold", k)) => k.parse().map(Self::KFold).map_err(|_| bad()),
            Some(("holdout", f)) => f.parse().map(Self::Holdout).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl Serialize for SplitScheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitPlan {
    pub scheme: SplitScheme,
    pub folds: Vec<Fold>,
    /// Recorded for provenance; splits never shuffle, so it does not change them.
    pub seed: u64,
}

pub fn make_splits(n: usize, scheme: &SplitScheme, seed: u64) -> Result<SplitPlan, EngineError> {
    let folds = match *scheme {
        SplitScheme::KFold(k) => {
            if k < 2 || k > n {
                return Err(EngineError::BadScheme(format!(
                    "kfold needs 2 <= k <= n, got k={k}, n={n}"
                )));
            }
            (0..k)
                .map(|b| {
                    let (lo, hi) = (b * n / k, (b + 1) * n / k);
                    Fold {
                        train: (0..lo).chain(hi..n).collect(),
                        test: (lo..hi).collect(),
                    }
                })
                .collect()
        }
        SplitScheme::Holdout(f) => {
            if !(f > 0.0 && f < 1.0) {
                return Err(EngineError::BadScheme(format!(
                    "holdout fraction must be in (0, 1), got {f}"
                )));
            }
            let cut = ((f * n as f64).ceil() as usize).min(n);
            if cut == n {
                return Err(EngineError::BadScheme(format!(
                    "holdout {f} leaves no test rows for n={n}"
                )));
            }
            vec![Fold {
                train: (0..cut).collect(),
                test: (cut..n).collect(),
            }]
        }
    };
    Ok(SplitPlan {
        scheme: *scheme,
        folds,
        seed,
    })
}

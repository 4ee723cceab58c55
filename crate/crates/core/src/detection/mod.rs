// SPDX-License-Identifier: Apache-2.0

//! Detection algorithms and the rule-based reinforcement filter.
//!
//! All detectors return one score per input point or row with higher meaning
//! more anomalous. Rows containing `NaN` are excluded from fitting and scored
//! `NaN`, which downstream thresholding treats as "not an outlier".

pub mod ar;
pub mod iforest;
pub mod knn;
pub mod matrix_profile;
pub mod rules;
pub mod threshold;
pub mod zscore;

pub use ar::ar_residual_detector;
pub use iforest::IsolationForest;
pub use knn::knn_detector;
pub use matrix_profile::matrix_profile_discord;
pub use rules::{rule_based_filter, Action, Predicate, Rule};
pub use threshold::threshold_labels;
pub use zscore::zscore_detector;

/// Index of the largest non-`NaN` score, lowest index on ties.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    scores
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_nan())
        .fold(None, |best: Option<(usize, f64)>, (i, &s)| match best {
            Some((_, b)) if b >= s => best,
            _ => Some((i, s)),
        })
        .map(|(i, _)| i)
}

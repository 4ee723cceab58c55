// SPDX-License-Identifier: Apache-2.0

use crate::error::PrimitiveError;
use crate::processing::{mean_std, STD_EPSILON};

/// `|x - mean| / std` with population statistics over the non-`NaN` points.
pub fn zscore_detector(x: &[f64]) -> Result<Vec<f64>, PrimitiveError> {
    if x.len() < 2 {
        return Err(PrimitiveError::SeriesTooShort {
            required: 2,
            n: x.len(),
        });
    }
    let (mean, std) = mean_std(x);
    let scale = std.max(STD_EPSILON);
    Ok(x.iter().map(|v| (v - mean).abs() / scale).collect())
}

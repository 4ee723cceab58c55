// SPDX-License-Identifier: Apache-2.0

use crate::error::PrimitiveError;

/// Number of labels `ceil(contamination * m)`. The product is nudged down by
/// 1e-9 so values like `0.07 * 100` don't round up past the intended count.
pub fn outlier_count(contamination: f64, m: usize) -> usize {
    ((contamination * m as f64 - 1e-9).ceil().max(0.0) as usize).min(m)
}

/// Labels the `ceil(contamination * m)` highest non-`NaN` scores as outliers,
/// `m` being the number of non-`NaN` scores. Ties go to the lower index.
pub fn threshold_labels(scores: &[f64], contamination: f64) -> Result<Vec<u8>, PrimitiveError> {
    if !(0.0..=1.0).contains(&contamination) {
        return Err(PrimitiveError::ContaminationOutOfRange(contamination));
    }
    let mut ranked: Vec<usize> = (0..scores.len()).filter(|&i| !scores[i].is_nan()).collect();
    let k = outlier_count(contamination, ranked.len());
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut labels = vec![0u8; scores.len()];
    for &i in &ranked[..k] {
        labels[i] = 1;
    }
    Ok(labels)
}

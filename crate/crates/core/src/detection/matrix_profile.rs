// SPDX-License-Identifier: Apache-2.0

use crate::error::PrimitiveError;
use crate::processing::STD_EPSILON;

use super::knn::euclidean;

/// Z-normalizes a subsequence with population statistics. A constant
/// subsequence maps to the zero vector.
pub fn z_normalize(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let std = (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    if std < STD_EPSILON {
        return vec![0.0; x.len()];
    }
    x.iter().map(|v| (v - mean) / std).collect()
}

/// Brute-force matrix profile: for every subsequence start `i`, the minimum
/// z-normalized Euclidean distance to any start `j` with `|i - j| >= window`.
///
/// The result has one entry per start (`n - window + 1`); starts without a
/// non-trivial neighbour, and subsequences containing `NaN`, are `NaN`. The
/// discord is the argmax.
pub fn matrix_profile_discord(x: &[f64], window: usize) -> Result<Vec<f64>, PrimitiveError> {
    let n = x.len();
    if window == 0 || n < 2 * window {
        return Err(PrimitiveError::WindowTooLarge { window, n });
    }
    let starts = n - window + 1;
    let subs: Vec<Option<Vec<f64>>> = (0..starts)
        .map(|i| {
            let s = &x[i..i + window];
            (!s.iter().any(|v| v.is_nan())).then(|| z_normalize(s))
        })
        .collect();
    Ok((0..starts)
        .map(|i| {
            let Some(a) = &subs[i] else {
                return f64::NAN;
            };
            (0..starts)
                .filter(|&j| i.abs_diff(j) >= window)
                .filter_map(|j| subs[j].as_ref().map(|b| euclidean(a, b)))
                .fold(f64::NAN, f64::min)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::argmax;

    #[test]
    fn repeated_motif_has_zero_profile() {
        let pattern = [0.0, 3.0, 1.0, -2.0, 5.0];
        let x: Vec<f64> = pattern.iter().cycle().take(20).copied().collect();
        let mp = matrix_profile_discord(&x, 5).unwrap();
        for i in (0..mp.len()).step_by(5) {
            assert!(mp[i] < 1e-9, "start {i}: {}", mp[i]);
        }
    }

    #[test]
    fn distinct_shape_is_discord() {
        let w = 10;
        let mut x: Vec<f64> = (0..120)
            .map(|t| (std::f64::consts::TAU * t as f64 / w as f64).sin())
            .collect();
        for (k, v) in x[60..70].iter_mut().enumerate() {
            *v = if k < 5 { 1.0 } else { -0.2 * k as f64 };
        }
        let mp = matrix_profile_discord(&x, w).unwrap();
        // The discord window overlaps the planted shape.
        let at = argmax(&mp).unwrap();
        assert!((60 - w + 1..70).contains(&at), "discord at {at}");
    }

    #[test]
    fn minimal_length_is_symmetric() {
        let x = [1.0, 4.0, 2.0, 8.0, -1.0, 0.0, 3.0, 3.5];
        let mp = matrix_profile_discord(&x, 4).unwrap();
        assert_eq!(mp.len(), 5);
        assert_eq!(mp[0], mp[4]);
        assert!(mp[1..4].iter().all(|v| v.is_nan()));
    }

    #[test]
    fn constant_subsequence_is_zero_vector() {
        assert_eq!(z_normalize(&[2.0; 4]), vec![0.0; 4]);
        assert_eq!(
            matrix_profile_discord(&[0.0; 7], 4).unwrap_err(),
            PrimitiveError::WindowTooLarge { window: 4, n: 7 }
        );
    }
}

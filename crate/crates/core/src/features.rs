// SPDX-License-Identifier: Apache-2.0

//! Feature-analysis primitives: per-window feature tables and matrix
//! factorization features consumed by detectors.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::PrimitiveError;
use crate::processing::segment_subsequences;

/// Row-major feature matrix. Row `i` describes the window starting at
/// `row_index_map[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub rows: Vec<Vec<f64>>,
    pub row_index_map: Vec<usize>,
    pub column_names: Vec<String>,
}

impl FeatureTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column_names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

/// Biased sample autocorrelation `r[0..=max_lag]`.
///
/// A zero-variance series has `r[0] = 1` and `r[k] = 0` for `k > 0`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>, PrimitiveError> {
    let n = x.len();
    if n < 2 {
        return Err(PrimitiveError::SeriesTooShort { required: 2, n });
    }
    if max_lag >= n {
        return Err(PrimitiveError::LagTooLarge { max_lag, n });
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    let mut r = vec![0.0; max_lag + 1];
    r[0] = 1.0;
    if denom == 0.0 {
        return Ok(r);
    }
    for (k, rk) in r.iter_mut().enumerate().skip(1) {
        let num: f64 = (0..n - k).map(|t| dev[t] * dev[t + k]).sum();
        *rk = num / denom;
    }
    Ok(r)
}

/// Rolling autocorrelation: lags `1..=max_lag` of every window.
pub fn windowed_autocorrelation(
    x: &[f64],
    window: i64,
    stride: i64,
    max_lag: usize,
) -> Result<FeatureTable, PrimitiveError> {
    let subs = segment_subsequences(x, window, stride)?;
    let rows = subs
        .rows
        .iter()
        .map(|w| autocorrelation(w, max_lag).map(|r| r[1..].to_vec()))
        .collect::<Result<_, _>>()?;
    Ok(FeatureTable {
        rows,
        row_index_map: subs.starts,
        column_names: (1..=max_lag).map(|k| format!("acf_{k}")).collect(),
    })
}

pub const WINDOW_STAT_NAMES: [&str; 6] = ["mean", "std", "min", "max", "skewness", "kurtosis"];

/// Population moment statistics of one window:
/// `[mean, std, min, max, skewness, excess kurtosis]`.
pub fn moment_statistics(w: &[f64]) -> [f64; 6] {
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in w {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (skew, kurt) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    if w.iter().any(|v| v.is_nan()) {
        return [f64::NAN; 6];
    }
    [mean, m2.sqrt(), min, max, skew, kurt]
}

pub fn window_statistics(x: &[f64], window: i64, stride: i64) -> Result<FeatureTable, PrimitiveError> {
    let subs = segment_subsequences(x, window, stride)?;
    Ok(FeatureTable {
        rows: subs.rows.iter().map(|w| moment_statistics(w).to_vec()).collect(),
        row_index_map: subs.starts,
        column_names: WINDOW_STAT_NAMES.iter().map(|s| s.to_string()).collect(),
    })
}

/// Full discrete Fourier transform by direct summation, as `(re, im)` pairs.
/// `O(w^2)`.
pub fn dft(x: &[f64]) -> Vec<(f64, f64)> {
    let w = x.len();
    (0..w)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                // Reducing k*t mod w keeps the angle in [0, 2pi).
                let angle = std::f64::consts::TAU * ((k * t) % w) as f64 / w as f64;
                re += v * angle.cos();
                im -= v * angle.sin();
            }
            (re, im)
        })
        .collect()
}

/// Magnitudes `|X_k|` for `k = 1..=n_bins` of every window.
pub fn dft_magnitudes(
    x: &[f64],
    window: i64,
    stride: i64,
    n_bins: usize,
) -> Result<FeatureTable, PrimitiveError> {
    let max = window.max(0) as usize / 2;
    if n_bins > max {
        return Err(PrimitiveError::TooManyBins { n_bins, max });
    }
    let subs = segment_subsequences(x, window, stride)?;
    let rows = subs
        .rows
        .iter()
        .map(|w| dft(w)[1..=n_bins].iter().map(|(re, im)| re.hypot(*im)).collect())
        .collect();
    Ok(FeatureTable {
        rows,
        row_index_map: subs.starts,
        column_names: (1..=n_bins).map(|k| format!("dft_{k}")).collect(),
    })
}

pub const NMF_EPSILON: f64 = 1e-12;

/// Result of [`nmf_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct NmfFit {
    pub w: Array2<f64>,
    pub h: Array2<f64>,
    /// Objective `||V - WH||_F^2` after each iteration.
    pub error_trace: Vec<f64>,
}

impl NmfFit {
    pub fn reconstruction(&self) -> Array2<f64> {
        self.w.dot(&self.h)
    }
}

fn frobenius_sq(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum()
}

/// Lee-Seung multiplicative updates on the Frobenius objective.
///
/// `W` and `H` start from a seeded uniform `(0, 1]` draw. Iteration stops after
/// `max_iter` rounds, or once the relative objective improvement
/// `(prev - cur) / prev` falls below `tol`.
pub fn nmf_fit(
    v: &Array2<f64>,
    rank: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<NmfFit, PrimitiveError> {
    let (m, n) = v.dim();
    if let Some(((row, col), _)) = v.indexed_iter().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
        return Err(PrimitiveError::NegativeEntry { row, col });
    }
    if rank == 0 || rank > m.min(n) {
        return Err(PrimitiveError::RankTooLarge { rank, max: m.min(n) });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 1 - U[0, 1) lies in (0, 1].
    let mut draw = |_| 1.0 - rng.random::<f64>();
    let mut w = Array2::from_shape_fn((m, rank), &mut draw);
    let mut h = Array2::from_shape_fn((rank, n), &mut draw);

    let mut error_trace = Vec::with_capacity(max_iter);
    let mut prev = frobenius_sq(&(v - &w.dot(&h)));
    for _ in 0..max_iter {
        let wt = w.t();
        let numer = wt.dot(v);
        let denom = wt.dot(&w).dot(&h);
        h.zip_mut_with(&numer, |x, &a| *x *= a);
        h.zip_mut_with(&denom, |x, &b| *x /= b + NMF_EPSILON);

        let ht = h.t();
        let numer = v.dot(&ht);
        let denom = w.dot(&h).dot(&ht);
        w.zip_mut_with(&numer, |x, &a| *x *= a);
        w.zip_mut_with(&denom, |x, &b| *x /= b + NMF_EPSILON);

        let err = frobenius_sq(&(v - &w.dot(&h)));
        error_trace.push(err);
        if prev <= 0.0 || (prev - err) / prev < tol {
            break;
        }
        prev = err;
    }
    Ok(NmfFit { w, h, error_trace })
}

/// Row-wise reconstruction error `||V_i - (WH)_i||_2`.
pub fn nmf_residual_features(v: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> Vec<f64> {
    let diff = v - &w.dot(h);
    diff.rows()
        .into_iter()
        .map(|r| r.iter().map(|d| d * d).sum::<f64>().sqrt())
        .collect()
}

// SPDX-License-Identifier: Apache-2.0

//! Autoregressive prediction-residual detector.

use crate::error::PrimitiveError;

pub const RIDGE_LAMBDA: f64 = 1e-8;

/// Fitted AR(p) model with intercept: `x_t = c + sum_k a_k x_{t-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl ArModel {
    /// Ordinary least squares over the targets `t` (each `t >= p`) selected by
    /// `use_target`, via the normal equations. A singular normal matrix is
    /// retried with ridge `lambda = 1e-8`.
    pub fn fit(
        x: &[f64],
        order: usize,
        mut use_target: impl FnMut(usize) -> bool,
    ) -> Result<Self, PrimitiveError> {
        let dim = order + 1;
        let mut xtx = vec![vec![0.0; dim]; dim];
        let mut xty = vec![0.0; dim];
        let mut used = 0usize;
        let mut row = vec![0.0; dim];
        for t in order..x.len() {
            if !use_target(t) || x[t - order..=t].iter().any(|v| v.is_nan()) {
                continue;
            }
            row[0] = 1.0;
            for k in 1..=order {
                row[k] = x[t - k];
            }
            for i in 0..dim {
                xty[i] += row[i] * x[t];
                for j in 0..dim {
                    xtx[i][j] += row[i] * row[j];
                }
            }
            used += 1;
        }
        if used == 0 {
            return Err(PrimitiveError::NoTrainingRows);
        }
        let beta = match cholesky_solve(&xtx, &xty) {
            Some(b) => b,
            None => {
                for (i, r) in xtx.iter_mut().enumerate() {
                    r[i] += RIDGE_LAMBDA;
                }
                cholesky_solve(&xtx, &xty).ok_or(PrimitiveError::NoTrainingRows)?
            }
        };
        Ok(Self {
            intercept: beta[0],
            coefficients: beta[1..].to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// One-step-ahead prediction of `x[t]`, for `t >= p`.
    pub fn predict(&self, x: &[f64], t: usize) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, a)| a * x[t - k - 1])
                .sum::<f64>()
    }

    /// `|x_t - x̂_t|` for `t >= p`, `NaN` before.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|t| {
                if t < self.order() {
                    f64::NAN
                } else {
                    (x[t] - self.predict(x, t)).abs()
                }
            })
            .collect()
    }
}

/// Solves `A b = y` for symmetric `A`; `None` unless `A` is numerically
/// positive definite.
fn cholesky_solve(a: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let n = y.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d.is_nan() || d <= 1e-12 * scale.max(1.0) {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    let mut z = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * z[k]).sum();
        z[i] = (y[i] - s) / l[i][i];
    }
    let mut b = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * b[k]).sum();
        b[i] = (z[i] - s) / l[i][i];
    }
    Some(b)
}

/// Fits AR(`order`) on the first `ceil(train_fraction * n)` points and scores
/// every point by its absolute one-step prediction residual.
pub fn ar_residual_detector(
    x: &[f64],
    order: usize,
    train_fraction: f64,
) -> Result<Vec<f64>, PrimitiveError> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(PrimitiveError::BadHyperparam {
            name: "train_fraction".into(),
            reason: format!("{train_fraction} outside (0, 1]"),
        });
    }
    check_length(x.len(), order)?;
    let n_train = (train_fraction * x.len() as f64).ceil() as usize;
    let model = ArModel::fit(x, order, |t| t < n_train)?;
    Ok(model.residuals(x))
}

pub(crate) fn check_length(n: usize, order: usize) -> Result<(), PrimitiveError> {
    let required = (3 * order).max(order + 2);
    if order == 0 || n < required {
        return Err(PrimitiveError::SeriesTooShort { required, n });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::argmax;

    #[test]
    fn decaying_series_with_bump() {
        let mut x: Vec<f64> = (0..40).map(|t| 8.0 * 0.5f64.powi(t)).collect();
        x[20] += 5.0;
        // Oracle: residuals of the true coefficients peak at the bump.
        let truth = ArModel {
            intercept: 0.0,
            coefficients: vec![0.5],
        };
        assert_eq!(argmax(&truth.residuals(&x)), Some(20));

        let scores = ar_residual_detector(&x, 1, 1.0).unwrap();
        assert!(scores[0].is_nan());
        assert_eq!(argmax(&scores), Some(20));
    }

    #[test]
    fn constant_series_is_predictable() {
        let scores = ar_residual_detector(&[5.0; 30], 2, 1.0).unwrap();
        assert!(scores[2..].iter().all(|s| *s < 1e-9), "{scores:?}");
    }

    #[test]
    fn ramp_is_reproduced_by_ar2() {
        let x: Vec<f64> = (0..50).map(|t| 0.75 * t as f64 - 3.0).collect();
        let scores = ar_residual_detector(&x, 2, 1.0).unwrap();
        assert!(scores[..2].iter().all(|s| s.is_nan()));
        assert!(scores[2..].iter().all(|s| *s < 1e-6), "{scores:?}");
    }

    #[test]
    fn recovers_coefficients() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let noise = Normal::new(0.0, 0.1).unwrap();
        let mut x = vec![1.0, -0.5];
        for t in 2..5000 {
            let v = 0.3 + 0.6 * x[t - 1] - 0.2 * x[t - 2] + noise.sample(&mut rng);
            x.push(v);
        }
        let m = ArModel::fit(&x, 2, |_| true).unwrap();
        assert!((m.coefficients[0] - 0.6).abs() < 0.05, "{m:?}");
        assert!((m.coefficients[1] + 0.2).abs() < 0.05, "{m:?}");
        assert!((m.intercept - 0.3).abs() < 0.05, "{m:?}");
    }

    #[test]
    fn too_short() {
        assert_eq!(
            ar_residual_detector(&[1.0; 8], 3, 1.0).unwrap_err(),
            PrimitiveError::SeriesTooShort { required: 9, n: 8 }
        );
    }
}

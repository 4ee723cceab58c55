// SPDX-License-Identifier: Apache-2.0

use crate::error::PrimitiveError;

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Distance from each row to its `k`-th nearest other row, by brute force.
///
/// Rows containing `NaN` neither get a score nor serve as neighbours.
pub fn knn_detector(rows: &[Vec<f64>], k: usize) -> Result<Vec<f64>, PrimitiveError> {
    let usable: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].iter().all(|v| !v.is_nan()))
        .collect();
    if k == 0 || usable.len() <= k {
        return Err(PrimitiveError::KTooLarge {
            k,
            rows: usable.len(),
        });
    }
    let mut scores = vec![f64::NAN; rows.len()];
    let mut dists = Vec::with_capacity(usable.len());
    for &i in &usable {
        dists.clear();
        dists.extend(
            usable
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| euclidean(&rows[i], &rows[j])),
        );
        let (_, kth, _) = dists.select_nth_unstable_by(k - 1, f64::total_cmp);
        scores[i] = *kth;
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::argmax;

    #[test]
    fn three_points() {
        let rows = vec![vec![0.0], vec![0.1], vec![10.0]];
        let s = knn_detector(&rows, 1).unwrap();
        assert_eq!(s, vec![0.1, 0.1, 9.9]);
        assert_eq!(argmax(&s), Some(2));
    }

    #[test]
    fn duplicates_score_zero() {
        let base = [vec![1.0, 2.0], vec![-3.0, 0.5], vec![7.0, 7.0]];
        let rows: Vec<Vec<f64>> = base.iter().flat_map(|r| [r.clone(), r.clone()]).collect();
        assert_eq!(knn_detector(&rows, 1).unwrap(), vec![0.0; 6]);
    }

    #[test]
    fn homogeneous_under_scaling() {
        let rows = vec![vec![0.3, 1.0], vec![2.0, -1.5], vec![4.25, 0.0], vec![-1.0, 9.0]];
        let doubled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| 2.0 * v).collect()).collect();
        let a = knn_detector(&rows, 2).unwrap();
        let b = knn_detector(&doubled, 2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(2.0 * x, *y);
        }
    }

    #[test]
    fn k_too_large() {
        let rows = vec![vec![0.0], vec![1.0]];
        assert_eq!(
            knn_detector(&rows, 2).unwrap_err(),
            PrimitiveError::KTooLarge { k: 2, rows: 2 }
        );
    }
}

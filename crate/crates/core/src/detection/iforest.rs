// SPDX-License-Identifier: Apache-2.0

//! Isolation forest.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::PrimitiveError;

pub const EULER_GAMMA: f64 = 0.5772156649;

/// Average path length of an unsuccessful BST search over `m` points,
/// `c(m) = 2 H(m - 1) - 2 (m - 1) / m` with `H(i) = ln i + gamma`; `c(m) = 0`
/// for `m <= 1`.
pub fn average_path_length(m: usize) -> f64 {
    if m <= 1 {
        return 0.0;
    }
    let m = m as f64;
    2.0 * ((m - 1.0).ln() + EULER_GAMMA) - 2.0 * (m - 1.0) / m
}

/// `s = 2^(-E[h] / c(psi))`.
pub fn anomaly_score(mean_path_length: f64, subsample_size: usize) -> f64 {
    (-mean_path_length / average_path_length(subsample_size)).exp2()
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Internal {
        feature: usize,
        split: f64,
        left: usize,
        right: usize,
    },
    External {
        size: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct IsolationTree {
    nodes: Vec<Node>,
}

impl IsolationTree {
    fn build(data: &[&[f64]], height_limit: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut tree = Self { nodes: Vec::new() };
        let mut points: Vec<&[f64]> = data.to_vec();
        tree.grow(&mut points, 0, height_limit, rng);
        tree
    }

    fn grow(
        &mut self,
        points: &mut [&[f64]],
        depth: usize,
        height_limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::External { size: points.len() });
        if depth >= height_limit || points.len() <= 1 {
            return id;
        }
        let dims = points[0].len();
        let ranges: Vec<(usize, f64, f64)> = (0..dims)
            .filter_map(|f| {
                let (lo, hi) = points
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[f]), hi.max(p[f]))
                    });
                (hi > lo).then_some((f, lo, hi))
            })
            .collect();
        if ranges.is_empty() {
            return id;
        }
        let (feature, lo, hi) = ranges[rng.random_range(0..ranges.len())];
        let split = rng.random_range(lo..hi);

        // Partition in place: points below the split first.
        let mut boundary = 0;
        for i in 0..points.len() {
            if points[i][feature] < split {
                points.swap(i, boundary);
                boundary += 1;
            }
        }
        let (below, above) = points.split_at_mut(boundary);
        let left = self.grow(below, depth + 1, height_limit, rng);
        let right = self.grow(above, depth + 1, height_limit, rng);
        self.nodes[id] = Node::Internal {
            feature,
            split,
            left,
            right,
        };
        id
    }

    fn path_length(&self, x: &[f64]) -> f64 {
        let mut node = 0;
        let mut depth = 0usize;
        loop {
            match &self.nodes[node] {
                Node::Internal {
                    feature,
                    split,
                    left,
                    right,
                } => {
                    node = if x[*feature] < *split { *left } else { *right };
                    depth += 1;
                }
                Node::External { size } => return depth as f64 + average_path_length(*size),
            }
        }
    }
}

/// Fitted isolation forest. Immutable after fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct IsolationForest {
    trees: Vec<IsolationTree>,
    subsample_size: usize,
    dims: usize,
}

impl IsolationForest {
    /// Grows `n_trees` trees, each on a seeded subsample of
    /// `min(subsample_size, rows)` points with height limit `ceil(log2 psi)`.
    pub fn fit(
        rows: &[Vec<f64>],
        n_trees: usize,
        subsample_size: usize,
        seed: u64,
    ) -> Result<Self, PrimitiveError> {
        if subsample_size < 2 {
            return Err(PrimitiveError::SubsampleTooSmall(subsample_size));
        }
        if n_trees == 0 {
            return Err(PrimitiveError::BadHyperparam {
                name: "n_trees".into(),
                reason: "must be at least 1".into(),
            });
        }
        let usable: Vec<&[f64]> = rows
            .iter()
            .filter(|r| r.iter().all(|v| !v.is_nan()))
            .map(Vec::as_slice)
            .collect();
        if usable.len() < 2 {
            return Err(PrimitiveError::TooFewRows {
                required: 2,
                n: usable.len(),
            });
        }
        let dims = usable[0].len();
        let psi = subsample_size.min(usable.len());
        let height_limit = (psi as f64).log2().ceil() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trees = (0..n_trees)
            .map(|_| {
                let sample: Vec<&[f64]> = index::sample(&mut rng, usable.len(), psi)
                    .into_iter()
                    .map(|i| usable[i])
                    .collect();
                IsolationTree::build(&sample, height_limit, &mut rng)
            })
            .collect();
        Ok(Self {
            trees,
            subsample_size: psi,
            dims,
        })
    }

    /// Effective subsample size `psi` used for normalization.
    pub fn subsample_size(&self) -> usize {
        self.subsample_size
    }

    pub fn mean_path_length(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.path_length(x)).sum::<f64>() / self.trees.len() as f64
    }

    /// Anomaly score in `(0, 1)` per row; `NaN` for rows containing `NaN`.
    pub fn score(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, PrimitiveError> {
        rows.iter()
            .map(|r| {
                if r.len() != self.dims {
                    return Err(PrimitiveError::LengthMismatch {
                        left: r.len(),
                        right: self.dims,
                    });
                }
                Ok(if r.iter().any(|v| v.is_nan()) {
                    f64::NAN
                } else {
                    anomaly_score(self.mean_path_length(r), self.subsample_size)
                })
            })
            .collect()
    }
}

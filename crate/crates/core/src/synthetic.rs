// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic series with planted anomalies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::TimeSeriesDataset;
use crate::processing::mean_std;

/// Seasonal-plus-noise series with isolated spikes.
///
/// The series is `amplitude * sin(2 pi t / period) + noise`. The timeline is
/// cut into `n_spikes` equal segments and each receives one spike of
/// `magnitude` standard deviations of the clean series, with random sign, at a
/// random position at least `margin` points from the segment edges.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeBenchmark {
    pub n: usize,
    pub period: f64,
    pub amplitude: f64,
    pub noise_std: f64,
    pub n_spikes: usize,
    pub magnitude: f64,
    pub margin: usize,
    pub seed: u64,
}

impl Default for SpikeBenchmark {
    fn default() -> Self {
        Self {
            n: 2000,
            period: 50.0,
            amplitude: 1.0,
            noise_std: 0.1,
            n_spikes: 10,
            magnitude: 8.0,
            margin: 10,
            seed: 7,
        }
    }
}

impl SpikeBenchmark {
    /// The labelled dataset (one feature, `value`) and the spike positions.
    pub fn generate(&self) -> (TimeSeriesDataset, Vec<usize>) {
        assert!(self.n_spikes >= 1 && self.n >= self.n_spikes * (2 * self.margin + 1));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let noise = Normal::new(0.0, self.noise_std).expect("finite noise std");
        let mut x: Vec<f64> = (0..self.n)
            .map(|t| {
                let phase = std::f64::consts::TAU * t as f64 / self.period;
                self.amplitude * phase.sin() + noise.sample(&mut rng)
            })
            .collect();
        let (_, sigma) = mean_std(&x);
        let segment = self.n / self.n_spikes;
        let mut labels = vec![0u8; self.n];
        let spikes: Vec<usize> = (0..self.n_spikes)
            .map(|s| {
                let lo = s * segment + self.margin;
                let hi = (s + 1) * segment - self.margin;
                let at = rng.random_range(lo..hi);
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                x[at] += sign * self.magnitude * sigma;
                labels[at] = 1;
                at
            })
            .collect();
        let ds = TimeSeriesDataset::from_columns("spike_benchmark", vec![("value".into(), x)])
            .and_then(|d| d.with_labels(labels))
            .expect("generated dataset is well formed");
        (ds, spikes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_dataset;

    #[test]
    fn plants_one_spike_per_segment() {
        let (ds, spikes) = SpikeBenchmark::default().generate();
        assert_eq!(ds.len(), 2000);
        assert_eq!(spikes.len(), 10);
        let labels = ds.labels().unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 10);
        for (s, &at) in spikes.iter().enumerate() {
            assert!((s * 200 + 10..(s + 1) * 200 - 10).contains(&at));
            assert_eq!(labels[at], 1);
        }
    }

    #[test]
    fn seeded() {
        let a = SpikeBenchmark::default().generate();
        let b = SpikeBenchmark::default().generate();
        assert_eq!(a, b);
        let c = SpikeBenchmark {
            seed: 8,
            ..SpikeBenchmark::default()
        }
        .generate();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn csv_round_trip() {
        let (ds, _) = SpikeBenchmark::default().generate();
        let back = generate_dataset(&ds.to_csv(), Some(2), None).unwrap();
        assert_eq!(back.timestamps(), ds.timestamps());
        assert_eq!(back.labels(), ds.labels());
        assert_eq!(back.features()[0].values, ds.features()[0].values);
    }
}

//! Seeded synthetic data: Gaussian blobs standing in for operating modes,
//! drift ramps leaving a blob, and multi-tone vibration traces.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::SignalTrace;
use crate::FeatureMatrix;

/// `n x d` matrix of independent standard normal draws.
pub fn gaussian_matrix(n: usize, d: usize, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = Array2::from_shape_simple_fn((n, d), || StandardNormal.sample(&mut rng));
    FeatureMatrix::new(data).expect("finite draws")
}

/// Isotropic Gaussian clusters.
#[derive(Debug, Clone)]
pub struct BlobSpec {
    pub centers: Vec<Vec<f64>>,
    pub std_devs: Vec<f64>,
    pub sizes: Vec<usize>,
}

impl BlobSpec {
    /// Three well separated modes in `d` dimensions with unequal spreads,
    /// loosely shaped like steady-state vibration features at three speeds.
    pub fn rpm_like(per_cluster: usize, d: usize) -> Self {
        let centers = (0..3)
            .map(|k| {
                (0..d)
                    .map(|j| 4.0 * (1.3 * j as f64 + 2.1 * k as f64).sin() + 2.0 * k as f64)
                    .collect()
            })
            .collect();
        Self {
            centers,
            std_devs: vec![0.6, 0.8, 1.0],
            sizes: vec![per_cluster; 3],
        }
    }

    /// `k` clusters spaced `spacing` apart along the first axis.
    pub fn line(k: usize, per_cluster: usize, d: usize, spacing: f64, std_dev: f64) -> Self {
        let centers = (0..k)
            .map(|c| {
                let mut v = vec![0.0; d];
                v[0] = c as f64 * spacing;
                v
            })
            .collect();
        Self {
            centers,
            std_devs: vec![std_dev; k],
            sizes: vec![per_cluster; k],
        }
    }

    pub fn dims(&self) -> usize {
        self.centers.first().map_or(0, Vec::len)
    }
}

/// Sample the blobs; rows are grouped by cluster and labelled `0..k`.
pub fn blobs(spec: &BlobSpec, seed: u64) -> (FeatureMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dims();
    let n: usize = spec.sizes.iter().sum();
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (c, ((center, &sd), &size)) in spec
        .centers
        .iter()
        .zip(&spec.std_devs)
        .zip(&spec.sizes)
        .enumerate()
    {
        for _ in 0..size {
            for &mu in center {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(mu + sd * z);
            }
            labels.push(c);
        }
    }
    let x = Array2::from_shape_vec((n, d), data).expect("n x d");
    (FeatureMatrix::new(x).expect("finite draws"), labels)
}

/// Points marching from `start` along `direction` in equal steps: the
/// synthetic analogue of a fault developing over time.
pub fn drift_ramp(start: &[f64], direction: &[f64], steps: usize, step: f64) -> FeatureMatrix {
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rows: Vec<Vec<f64>> = (0..steps)
        .map(|t| {
            start
                .iter()
                .zip(direction)
                .map(|(s, dir)| s + (t as f64 + 1.0) * step * dir / norm)
                .collect()
        })
        .collect();
    FeatureMatrix::from_rows(&rows).expect("finite ramp")
}

/// Sum of sines `(frequency_hz, amplitude)` plus optional Gaussian noise.
pub fn tone_trace(
    tones: &[(f64, f64)],
    sample_rate_hz: f64,
    len: usize,
    noise: f64,
    seed: u64,
) -> SignalTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..len)
        .map(|i| {
            let t = i as f64 / sample_rate_hz;
            let s: f64 = tones
                .iter()
                .map(|&(f, a)| a * (2.0 * std::f64::consts::PI * f * t).sin())
                .sum();
            let z: f64 = StandardNormal.sample(&mut rng);
            s + noise * z
        })
        .collect();
    SignalTrace::new(samples, sample_rate_hz).expect("valid synthetic trace")
}

//! Synthetic imbalanced two-cluster datasets for desk-scale benchmarks.

use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::util::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub n: usize,
    pub dims: usize,
    /// `r` in the minority:majority ratio `1 : r`.
    pub imbalance_ratio: f64,
    /// Euclidean distance between the two unit-variance cluster means.
    pub separation: f64,
    /// Fraction of labels flipped after sampling.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self { n: 2000, dims: 5, imbalance_ratio: 20.0, separation: 2.0, noise_rate: 0.05, seed: crate::DEFAULT_SEED }
    }
}

/// Draws `round(n / (1 + r))` minority rows around the mean
/// `separation / sqrt(dims)` in every coordinate and the rest around the
/// origin, then flips the labels of `round(noise_rate * n)` random rows.
pub fn generate_synthetic_benchmark(spec: &BenchmarkSpec) -> Result<Dataset> {
    if !(spec.imbalance_ratio >= 1.0) {
        return Err(Error::InvalidParameter("imbalance ratio must be >= 1".into()));
    }
    if !(spec.noise_rate >= 0.0 && spec.noise_rate < 0.5) {
        return Err(Error::InvalidParameter("noise rate must be in [0, 0.5)".into()));
    }
    if spec.dims == 0 || spec.n == 0 || !spec.separation.is_finite() {
        return Err(Error::InvalidParameter("n and dims must be positive, separation finite".into()));
    }
    let mut rng = rng(spec.seed);
    let minority = libm::round(spec.n as f64 / (1.0 + spec.imbalance_ratio)) as usize;
    let mut labels: Vec<Label> = (0..spec.n).map(|i| Label::from(i < minority)).collect();
    labels.shuffle(&mut rng);

    let offset = spec.separation / libm::sqrt(spec.dims as f64);
    let mut features = Vec::with_capacity(spec.n * spec.dims);
    for &label in &labels {
        let center = if label == 1 { offset } else { 0.0 };
        for _ in 0..spec.dims {
            let z: f64 = rng.sample(StandardNormal);
            features.push(center + z);
        }
    }
    let flips = libm::round(spec.noise_rate * spec.n as f64) as usize;
    for i in index::sample(&mut rng, spec.n, flips) {
        labels[i] = 1 - labels[i];
    }
    let names = (0..spec.dims).map(|i| alloc::format!("x{i}")).collect();
    let kinds = alloc::vec![crate::dataset::ColumnKind::Numeric; spec.dims];
    Ok(Dataset::from_flat(names, kinds, features, Some(labels))?.with_origin_indices())
}

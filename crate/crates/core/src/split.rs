//! Stratified holdout and k-fold partitions.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::util::{largest_remainder, rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSpec {
    /// Two parts: the first gets `ratio` of every class, the second the rest.
    Holdout { ratio: f64, seed: u64 },
    KFold { k: usize, seed: u64 },
}

impl SplitSpec {
    pub fn holdout(ratio: f64, seed: u64) -> Self {
        SplitSpec::Holdout { ratio, seed }
    }

    pub fn k_fold(k: usize, seed: u64) -> Self {
        SplitSpec::KFold { k, seed }
    }

    fn weights(&self) -> Result<Vec<f64>> {
        match *self {
            SplitSpec::Holdout { ratio, .. } => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::InvalidParameter(alloc::format!("holdout ratio {ratio} not in (0, 1)")));
                }
                Ok(alloc::vec![ratio, 1.0 - ratio])
            }
            SplitSpec::KFold { k, .. } => {
                if k < 2 {
                    return Err(Error::InvalidParameter(alloc::format!("k = {k}; need k >= 2")));
                }
                Ok(alloc::vec![1.0; k])
            }
        }
    }

    fn seed(&self) -> u64 {
        match *self {
            SplitSpec::Holdout { seed, .. } | SplitSpec::KFold { seed, .. } => seed,
        }
    }
}

/// Partitions the row indices of `d` so that every part holds each class in
/// proportion, within one row. Members of each class are shuffled with the
/// spec's seed and dealt out by largest-remainder counts; indices within a
/// part are returned in ascending order.
pub fn stratified_split(d: &Dataset, spec: &SplitSpec) -> Result<Vec<Vec<usize>>> {
    let labels = d.require_labels()?;
    let weights = spec.weights()?;
    let mut classes: Vec<Label> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let mut rng = rng(spec.seed());
    let mut parts: Vec<Vec<usize>> = alloc::vec![Vec::new(); weights.len()];
    for &class in &classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if let SplitSpec::KFold { k, .. } = *spec {
            if members.len() < k {
                return Err(Error::ClassTooSmall { label: class, count: members.len(), needed: k });
            }
        }
        members.shuffle(&mut rng);
        let counts = largest_remainder(members.len(), &weights);
        let mut start = 0;
        for (part, count) in parts.iter_mut().zip(counts) {
            part.extend_from_slice(&members[start..start + count]);
            start += count;
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    Ok(parts)
}

/// Holdout split materialised as `(first, second)` datasets.
pub fn holdout(d: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let parts = stratified_split(d, &SplitSpec::holdout(ratio, seed))?;
    Ok((d.subset(&parts[0]), d.subset(&parts[1])))
}

//! Data synthesis block: minority-class generators and the F1 race that
//! picks one of them.
//!
//! [`meta_synthesize`] splits the input into a sub-training and a validation
//! part, lets every technique oversample the sub-training part, trains a
//! model on each augmented set and keeps the technique with the best
//! validation F1 (first in list order on ties). Validation rows the winning
//! model classifies correctly are merged into the augmented set; the rest are
//! returned as the misclassified set that drives the filtering block.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::classifier::{predict, Learner};
use crate::dataset::{class_stats, Dataset, Label, Provenance};
use crate::error::{Error, Result};
use crate::metrics::f1_score;
use crate::split::{stratified_split, SplitSpec};
use crate::util::rng;

/// A generator of synthetic minority rows.
pub trait SynthesisTechnique {
    fn name(&self) -> String;
    /// Returns only the new rows, labeled with the minority label and tagged
    /// [`Provenance::Synthetic`].
    fn generate(&self, train: &Dataset, seed: u64) -> Result<Dataset>;
}

/// Minority and majority labels of a binary dataset with their counts.
/// The minority is the rarer class; ties make label 1 the minority.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassBalance {
    pub minority: Label,
    pub minority_count: usize,
    pub majority: Label,
    pub majority_count: usize,
}

impl ClassBalance {
    pub fn of(d: &Dataset) -> Result<Self> {
        d.require_binary()?;
        let stats = class_stats(d)?;
        let (c0, c1) = (stats.count(0), stats.count(1));
        Ok(if c1 <= c0 {
            Self { minority: 1, minority_count: c1, majority: 0, majority_count: c0 }
        } else {
            Self { minority: 0, minority_count: c0, majority: 1, majority_count: c1 }
        })
    }

    /// Rows to add so that `minority / majority` reaches `target_ratio`.
    pub fn deficit(&self, target_ratio: f64) -> usize {
        let want = libm::round(target_ratio * self.majority_count as f64) as usize;
        want.saturating_sub(self.minority_count)
    }
}

fn minority_indices(d: &Dataset, label: Label) -> Vec<usize> {
    let labels = d.labels().unwrap_or(&[]);
    (0..d.n_rows()).filter(|&i| labels[i] == label).collect()
}

fn synthetic_rows(train: &Dataset, rows: Vec<f64>, label: Label) -> Result<Dataset> {
    let n = if train.n_features() == 0 { 0 } else { rows.len() / train.n_features() };
    Ok(Dataset::from_flat(
        train.column_names().to_vec(),
        train.column_kinds().to_vec(),
        rows,
        Some(alloc::vec![label; n]),
    )?
    .with_provenance(Provenance::Synthetic))
}

fn check_ratio(target_ratio: f64) -> Result<()> {
    if target_ratio > 0.0 && target_ratio.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("target ratio {target_ratio} must be positive")))
    }
}

/// Duplicates minority rows drawn uniformly with replacement until the
/// minority reaches `target_ratio` times the majority.
pub fn random_oversample(train: &Dataset, target_ratio: f64, seed: u64) -> Result<Dataset> {
    check_ratio(target_ratio)?;
    let balance = ClassBalance::of(train)?;
    if balance.minority_count == 0 {
        return Err(Error::EmptyMinority);
    }
    let pool = minority_indices(train, balance.minority);
    let mut rng = rng(seed);
    let mut rows = Vec::new();
    for _ in 0..balance.deficit(target_ratio) {
        rows.extend_from_slice(train.row(pool[rng.random_range(0..pool.len())]));
    }
    synthetic_rows(train, rows, balance.minority)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// SMOTE: each new row is `x + u * (nn - x)` for a minority row `x` drawn
/// uniformly, `nn` drawn uniformly from its `k` nearest minority neighbours
/// (Euclidean; ties by row order) and `u` uniform in `[0, 1)`. `k` is
/// clamped to `minority_count - 1`.
pub fn smote(train: &Dataset, k_neighbors: usize, target_ratio: f64, seed: u64) -> Result<Dataset> {
    check_ratio(target_ratio)?;
    if k_neighbors == 0 {
        return Err(Error::InvalidParameter("k_neighbors must be positive".into()));
    }
    let balance = ClassBalance::of(train)?;
    if balance.minority_count < 2 {
        return Err(Error::TooFewMinority(balance.minority_count));
    }
    let pool = minority_indices(train, balance.minority);
    let k = k_neighbors.min(pool.len() - 1);
    let neighbours: Vec<Vec<usize>> = pool
        .iter()
        .map(|&i| {
            let mut others: Vec<(f64, usize)> = pool
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (squared_distance(train.row(i), train.row(j)), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = rng(seed);
    let mut rows = Vec::new();
    for _ in 0..balance.deficit(target_ratio) {
        let a = rng.random_range(0..pool.len());
        let nn = neighbours[a][rng.random_range(0..k)];
        let u: f64 = rng.random();
        let x = train.row(pool[a]);
        rows.extend(x.iter().zip(train.row(nn)).map(|(xi, ni)| xi + u * (ni - xi)));
    }
    synthetic_rows(train, rows, balance.minority)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomOversampler {
    pub target_ratio: f64,
}

impl SynthesisTechnique for RandomOversampler {
    fn name(&self) -> String {
        "random-oversample".into()
    }

    fn generate(&self, train: &Dataset, seed: u64) -> Result<Dataset> {
        random_oversample(train, self.target_ratio, seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Smote {
    pub k_neighbors: usize,
    pub target_ratio: f64,
}

impl Default for Smote {
    fn default() -> Self {
        Self { k_neighbors: 5, target_ratio: 1.0 }
    }
}

impl SynthesisTechnique for Smote {
    fn name(&self) -> String {
        "smote".into()
    }

    fn generate(&self, train: &Dataset, seed: u64) -> Result<Dataset> {
        smote(train, self.k_neighbors, self.target_ratio, seed)
    }
}

/// Offers rows generated elsewhere (for example by a tabular GAN) as a
/// technique. Labeled rows are filtered to the current minority label;
/// unlabeled rows are all taken as minority rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub name: String,
    pub rows: Dataset,
}

impl SynthesisTechnique for Replay {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn generate(&self, train: &Dataset, _seed: u64) -> Result<Dataset> {
        if self.rows.n_features() != train.n_features() {
            return Err(Error::DimensionMismatch { expected: train.n_features(), got: self.rows.n_features() });
        }
        let minority = ClassBalance::of(train)?.minority;
        let keep = match self.rows.labels() {
            Some(l) => self.rows.filter_rows(|i| l[i] == minority),
            None => self.rows.clone(),
        };
        let rows = keep.features().to_vec();
        synthetic_rows(train, rows, minority)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TechniqueScore {
    pub name: String,
    pub f1: f64,
}

#[derive(Debug, Clone)]
pub struct SynthesisOutcome<M> {
    /// Sub-training rows, the winner's synthetic rows and the correctly
    /// classified validation rows (tagged validation-merged).
    pub augmented: Dataset,
    /// Validation rows the final model misclassified.
    pub misclassified: Dataset,
    pub chosen: usize,
    pub chosen_technique: String,
    /// Validation F1 of every technique, in list order.
    pub scores: Vec<TechniqueScore>,
    pub model: M,
    pub train_rows: usize,
    pub synthetic_rows: usize,
    pub validation_rows: usize,
    pub merged_rows: usize,
}

/// Runs the technique race on `d`. `split` must be a holdout spec; its first
/// part becomes the sub-training set. Every technique is seeded with `seed`.
pub fn meta_synthesize<L: Learner>(
    d: &Dataset,
    techniques: &[&dyn SynthesisTechnique],
    learner: &L,
    split: &SplitSpec,
    seed: u64,
) -> Result<SynthesisOutcome<L::Model>> {
    if techniques.is_empty() {
        return Err(Error::NoTechniques);
    }
    if !matches!(split, SplitSpec::Holdout { .. }) {
        return Err(Error::InvalidParameter("synthesis needs a holdout split".into()));
    }
    d.require_binary()?;
    let parts = stratified_split(d, split)?;
    let train = d.subset(&parts[0]);
    let val = d.subset(&parts[1]);
    let val_labels = val.require_labels()?;

    let mut best: Option<(usize, f64, Dataset, L::Model, usize)> = None;
    let mut scores = Vec::with_capacity(techniques.len());
    for (i, tech) in techniques.iter().enumerate() {
        let syn = tech.generate(&train, seed)?;
        let n_syn = syn.n_rows();
        let aug = train.concat(&syn)?;
        let model = learner.fit(&aug)?;
        let f1 = f1_score(val_labels, &predict(&model, &val, 0.5)?)?;
        scores.push(TechniqueScore { name: tech.name(), f1 });
        // strict > keeps the earliest technique on ties
        if best.as_ref().is_none_or(|b| f1 > b.1) {
            best = Some((i, f1, aug, model, n_syn));
        }
    }
    // generation and training are deterministic, so the race's run of the
    // winner is exactly what regenerating and retraining would produce
    let (chosen, _, aug, model, synthetic_rows) = best.ok_or(Error::NoTechniques)?;

    let predicted = predict(&model, &val, 0.5)?;
    let correct: Vec<usize> = (0..val.n_rows()).filter(|&i| predicted[i] == val_labels[i]).collect();
    let wrong: Vec<usize> = (0..val.n_rows()).filter(|&i| predicted[i] != val_labels[i]).collect();
    let merged = val.subset(&correct).with_provenance(Provenance::ValidationMerged);
    let augmented = aug.concat(&merged)?;
    Ok(SynthesisOutcome {
        misclassified: val.subset(&wrong),
        chosen_technique: scores[chosen].name.to_string(),
        chosen,
        scores,
        model,
        train_rows: train.n_rows(),
        synthetic_rows,
        validation_rows: val.n_rows(),
        merged_rows: merged.n_rows(),
        augmented,
    })
}

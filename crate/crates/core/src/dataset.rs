//! In-memory tabular dataset.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class identifier. Binary datasets use `0` (majority) and `1` (minority);
/// k-fold unknown-label filtering additionally trains on the artificial
/// label `-1`.
pub type Label = i32;

/// Label assigned to unlabeled rows while training the abstaining model.
pub const ARTIFICIAL_LABEL: Label = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    /// Integer codes produced by label-encoding a string column.
    Categorical,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Categorical => "categorical",
        }
    }
}

/// Where a row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Original,
    Synthetic,
    Retained,
    PseudoLabeled,
    ValidationMerged,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::Synthetic => "synthetic",
            Provenance::Retained => "retained",
            Provenance::PseudoLabeled => "pseudo-labeled",
            Provenance::ValidationMerged => "validation-merged",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "original" => Provenance::Original,
            "synthetic" => Provenance::Synthetic,
            "retained" => Provenance::Retained,
            "pseudo-labeled" => Provenance::PseudoLabeled,
            "validation-merged" => Provenance::ValidationMerged,
            _ => return None,
        })
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A row-major matrix of finite features with optional labels.
///
/// Every row also carries a [`Provenance`] tag and, for rows that trace back
/// to a row of the loaded input, that row's index (`origin`). Synthetic rows
/// and rows from a separately supplied unlabeled file have no origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    column_names: Vec<String>,
    column_kinds: Vec<ColumnKind>,
    features: Vec<f64>,
    labels: Option<Vec<Label>>,
    provenance: Vec<Provenance>,
    origin: Vec<Option<usize>>,
}

impl Dataset {
    /// Builds a dataset from rows. All rows are tagged [`Provenance::Original`]
    /// with no origin index.
    pub fn from_rows(
        column_names: Vec<String>,
        column_kinds: Vec<ColumnKind>,
        rows: &[Vec<f64>],
        labels: Option<Vec<Label>>,
    ) -> Result<Self> {
        let d = column_names.len();
        let mut features = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
            features.extend_from_slice(row);
        }
        Self::from_flat(column_names, column_kinds, features, labels)
    }

    pub fn from_flat(
        column_names: Vec<String>,
        column_kinds: Vec<ColumnKind>,
        features: Vec<f64>,
        labels: Option<Vec<Label>>,
    ) -> Result<Self> {
        let d = column_names.len();
        if column_kinds.len() != d {
            return Err(Error::LengthMismatch { left: d, right: column_kinds.len() });
        }
        let n = if d == 0 {
            if !features.is_empty() {
                return Err(Error::DimensionMismatch { expected: 0, got: features.len() });
            }
            labels.as_ref().map_or(0, |l| l.len())
        } else {
            if !features.len().is_multiple_of(d) {
                return Err(Error::DimensionMismatch { expected: d, got: features.len() % d });
            }
            features.len() / d
        };
        if let Some((pos, _)) = features.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / d.max(1), column: pos % d.max(1) });
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::LengthMismatch { left: n, right: l.len() });
            }
        }
        Ok(Self {
            column_names,
            column_kinds,
            features,
            labels,
            provenance: alloc::vec![Provenance::Original; n],
            origin: alloc::vec![None; n],
        })
    }

    /// Numeric columns named `x0..x{d-1}`; handy for generated data and tests.
    pub fn numeric(rows: &[Vec<f64>], labels: Option<Vec<Label>>) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.len());
        let names = (0..d).map(|i| format!("x{i}")).collect();
        Self::from_rows(names, alloc::vec![ColumnKind::Numeric; d], rows, labels)
    }

    /// An empty dataset sharing this dataset's schema and label presence.
    pub fn empty_like(&self) -> Self {
        Self {
            column_names: self.column_names.clone(),
            column_kinds: self.column_kinds.clone(),
            features: Vec::new(),
            labels: self.labels.as_ref().map(|_| Vec::new()),
            provenance: Vec::new(),
            origin: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.provenance.len()
    }

    pub fn n_features(&self) -> usize {
        self.column_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows() == 0
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn column_kinds(&self) -> &[ColumnKind] {
        &self.column_kinds
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.features[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn value(&self, row: usize, column: usize) -> f64 {
        self.features[row * self.n_features() + column]
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    /// Labels, or [`Error::Unlabeled`].
    pub fn require_labels(&self) -> Result<&[Label]> {
        self.labels.as_deref().ok_or(Error::Unlabeled)
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn origin(&self) -> &[Option<usize>] {
        &self.origin
    }

    /// Replaces the labels (or removes them with `None`).
    pub fn with_labels(mut self, labels: Option<Vec<Label>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.n_rows() {
                return Err(Error::LengthMismatch { left: self.n_rows(), right: l.len() });
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    /// Tags every row with `p`.
    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance.iter_mut().for_each(|x| *x = p);
        self
    }

    pub fn set_provenance(&mut self, row: usize, p: Provenance) {
        self.provenance[row] = p;
    }

    /// Sets `origin[i] = Some(i)`, marking rows as indices of this dataset.
    pub fn with_origin_indices(mut self) -> Self {
        self.origin = (0..self.n_rows()).map(Some).collect();
        self
    }

    pub fn without_origin(mut self) -> Self {
        self.origin.iter_mut().for_each(|o| *o = None);
        self
    }

    /// Rows at `indices`, in the given order (duplicates allowed).
    pub fn subset(&self, indices: &[usize]) -> Self {
        let d = self.n_features();
        let mut features = Vec::with_capacity(indices.len() * d);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self {
            column_names: self.column_names.clone(),
            column_kinds: self.column_kinds.clone(),
            features,
            labels: self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect()),
            provenance: indices.iter().map(|&i| self.provenance[i]).collect(),
            origin: indices.iter().map(|&i| self.origin[i]).collect(),
        }
    }

    /// Rows where `keep` is true, in order.
    pub fn filter_rows(&self, keep: impl Fn(usize) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.n_rows()).filter(|&i| keep(i)).collect();
        self.subset(&idx)
    }

    /// Appends `other` after `self`. Both must have the same number of
    /// features and either both carry labels or neither does.
    pub fn concat(&self, other: &Dataset) -> Result<Self> {
        if self.n_features() != other.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: other.n_features(),
            });
        }
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            (None, None) => None,
            _ => return Err(Error::Schema("cannot concatenate labeled and unlabeled rows".into())),
        };
        let mut features = self.features.clone();
        features.extend_from_slice(&other.features);
        let mut provenance = self.provenance.clone();
        provenance.extend_from_slice(&other.provenance);
        let mut origin = self.origin.clone();
        origin.extend_from_slice(&other.origin);
        Ok(Self {
            column_names: self.column_names.clone(),
            column_kinds: self.column_kinds.clone(),
            features,
            labels,
            provenance,
            origin,
        })
    }

    /// Fails unless the dataset is labeled with values in {0, 1}.
    pub fn require_binary(&self) -> Result<&[Label]> {
        let labels = self.require_labels()?;
        if let Some(&bad) = labels.iter().find(|&&l| l != 0 && l != 1) {
            return Err(Error::NonBinaryLabel(bad));
        }
        Ok(labels)
    }

    /// Sorted distinct labels.
    pub fn label_set(&self) -> Result<Vec<Label>> {
        let mut set: Vec<Label> = self.require_labels()?.to_vec();
        set.sort_unstable();
        set.dedup();
        Ok(set)
    }
}

/// Per-class counts and priors of a labeled dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    counts: BTreeMap<Label, usize>,
    priors: BTreeMap<Label, f64>,
}

impl ClassStats {
    pub fn from_labels(labels: &[Label]) -> Self {
        let mut counts = BTreeMap::new();
        for &l in labels {
            *counts.entry(l).or_insert(0usize) += 1;
        }
        let n = labels.len() as f64;
        let priors = counts.iter().map(|(&l, &c)| (l, c as f64 / n)).collect();
        Self { counts, priors }
    }

    /// Stats known only through their priors, e.g. published class ratios.
    /// Counts are reported as zero.
    pub fn from_priors(priors: &[(Label, f64)]) -> Result<Self> {
        let sum: f64 = priors.iter().map(|p| p.1).sum();
        if priors.is_empty() || priors.iter().any(|p| !(p.1 >= 0.0)) || libm::fabs(sum - 1.0) > 1e-9 {
            return Err(Error::InvalidParameter("priors must be nonnegative and sum to 1".into()));
        }
        Ok(Self {
            counts: priors.iter().map(|&(l, _)| (l, 0)).collect(),
            priors: priors.iter().copied().collect(),
        })
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, label: Label) -> usize {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    /// `(label, count)` in ascending label order.
    pub fn counts(&self) -> impl Iterator<Item = (Label, usize)> + '_ {
        self.counts.iter().map(|(&l, &c)| (l, c))
    }

    pub fn classes(&self) -> Vec<Label> {
        self.priors.keys().copied().collect()
    }

    pub fn prior(&self, label: Label) -> f64 {
        self.priors.get(&label).copied().unwrap_or(0.0)
    }

    /// `(label, prior)` in ascending label order.
    pub fn priors(&self) -> Vec<(Label, f64)> {
        self.priors.iter().map(|(&l, &p)| (l, p)).collect()
    }

    /// `r` in the ratio `1 : r` of minority to majority.
    /// Infinite when fewer than two classes have nonzero prior.
    pub fn imbalance_ratio(&self) -> f64 {
        let min = self.priors.values().copied().fold(f64::INFINITY, f64::min);
        let max = self.priors.values().copied().fold(0.0, f64::max);
        if self.priors.len() < 2 || min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// The rarer class; ties go to the larger label (label 1 in binary data).
    pub fn minority(&self) -> Option<Label> {
        self.priors
            .iter()
            .min_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&l, _)| l)
    }

    pub fn majority(&self) -> Option<Label> {
        self.priors
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&l, _)| l)
    }
}

pub fn class_stats(d: &Dataset) -> Result<ClassStats> {
    Ok(ClassStats::from_labels(d.require_labels()?))
}

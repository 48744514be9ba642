//! Data filtering block.
//!
//! The margin of a row is the gap between the two largest class
//! probabilities a model assigns to it; small margins mark hard or noisy
//! rows. For each threshold `t` of a grid, rows with margin `>= t` are kept
//! and the others are filtered out, except for a class-proportional share
//! that is reintegrated. A model is retrained on each candidate set and
//! scored by F1 on the rows the synthesis block misclassified; the best
//! threshold (smallest on ties) wins.

use alloc::vec::Vec;

use crate::classifier::{predict, predict_proba, Learner, Model};
use crate::dataset::{ClassStats, Dataset, Label, Provenance};
use crate::error::{Error, Result};
use crate::metrics::f1_score;
use crate::util::largest_remainder;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginRecord {
    pub row: usize,
    pub margin: f64,
}

/// Highest minus second-highest class probability for every row of `d`.
pub fn margins<M: Model + ?Sized>(m: &M, d: &Dataset) -> Result<Vec<MarginRecord>> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let p = predict_proba(m, d)?;
    Ok((0..p.n_rows())
        .map(|row| {
            let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &v in p.row(row) {
                if v > first {
                    second = first;
                    first = v;
                } else if v > second {
                    second = v;
                }
            }
            let margin = if second.is_finite() { first - second } else { first };
            MarginRecord { row, margin: margin.clamp(0.0, 1.0) }
        })
        .collect())
}

/// Default difficulty thresholds `0.0, 0.1, ..., 0.9`.
pub fn default_thresholds() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 10.0).collect()
}

/// `n(c)` for every class of `priors`: largest-remainder rounding of
/// `p(c) * n_filtered_out`, ties to the smaller label.
pub fn retention_counts(priors: &ClassStats, n_filtered_out: usize) -> Vec<(Label, usize)> {
    let p = priors.priors();
    let weights: Vec<f64> = p.iter().map(|x| x.1).collect();
    let counts = largest_remainder(n_filtered_out, &weights);
    p.iter().map(|x| x.0).zip(counts).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Retention {
    /// Selected rows, tagged [`Provenance::Retained`], in pool order.
    pub rows: Dataset,
    /// Indices into the pool of the selected rows, ascending.
    pub selected: Vec<usize>,
    /// Target `n(c)` per class.
    pub requested: Vec<(Label, usize)>,
    /// Rows actually retained per class (less than requested on shortfall).
    pub retained: Vec<(Label, usize)>,
}

/// Picks `n(c)` rows of each class from the filtered-out `pool`, highest
/// margin first (ties by pool order). `pool_margins[i]` is the margin of pool
/// row `i`. A class with fewer rows than `n(c)` gives up all of them and the
/// shortfall is not reassigned.
pub fn retain_by_class(pool: &Dataset, priors: &ClassStats, pool_margins: &[f64]) -> Result<Retention> {
    if pool_margins.len() != pool.n_rows() {
        return Err(Error::LengthMismatch { left: pool.n_rows(), right: pool_margins.len() });
    }
    let labels = pool.require_labels()?;
    let requested = retention_counts(priors, pool.n_rows());
    let mut selected = Vec::new();
    let mut retained = Vec::with_capacity(requested.len());
    for &(class, want) in &requested {
        let mut members: Vec<usize> = (0..pool.n_rows()).filter(|&i| labels[i] == class).collect();
        members.sort_by(|&a, &b| pool_margins[b].total_cmp(&pool_margins[a]).then(a.cmp(&b)));
        members.truncate(want);
        retained.push((class, members.len()));
        selected.extend(members);
    }
    selected.sort_unstable();
    let rows = pool.subset(&selected).with_provenance(Provenance::Retained);
    Ok(Retention { rows, selected, requested, retained })
}

/// One row of the per-threshold table. `f1` is `-1` for thresholds whose
/// filtered set was empty or single-class and therefore skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdScore {
    pub threshold: f64,
    pub f1: f64,
    pub kept: usize,
    pub filtered_out: usize,
    pub retained: usize,
}

impl ThresholdScore {
    pub fn skipped(&self) -> bool {
        self.f1 < 0.0
    }
}

#[derive(Debug, Clone)]
pub struct FilterOutcome<M> {
    /// Kept rows plus retained rows, in the order of the augmented set.
    pub filtered: Dataset,
    pub chosen_threshold: f64,
    pub table: Vec<ThresholdScore>,
    pub retained_counts: Vec<(Label, usize)>,
    /// Filtered-out rows not retained at the chosen threshold.
    pub discarded: usize,
    pub margins: Vec<MarginRecord>,
    /// Model trained on `filtered`.
    pub model: M,
}

/// Builds the candidate filtered set of `aug` for threshold `t`.
/// Returns the dataset, kept count, filtered-out count and retention.
fn candidate(
    aug: &Dataset,
    margins: &[MarginRecord],
    t: f64,
    priors: &ClassStats,
    retention: bool,
) -> Result<(Dataset, usize, usize, Option<Retention>)> {
    let out: Vec<usize> = margins.iter().filter(|m| m.margin < t).map(|m| m.row).collect();
    let kept = aug.n_rows() - out.len();
    let mut in_set: Vec<bool> = margins.iter().map(|m| m.margin >= t).collect();
    let mut retained_rows: Vec<usize> = Vec::new();
    let ret = if retention && !out.is_empty() {
        let pool = aug.subset(&out);
        let pool_margins: Vec<f64> = out.iter().map(|&r| margins[r].margin).collect();
        let r = retain_by_class(&pool, priors, &pool_margins)?;
        for &s in &r.selected {
            in_set[out[s]] = true;
            retained_rows.push(out[s]);
        }
        Some(r)
    } else {
        None
    };
    let idx: Vec<usize> = (0..aug.n_rows()).filter(|&i| in_set[i]).collect();
    let mut filtered = aug.subset(&idx);
    // positions of retained rows inside `filtered`
    for (pos, &i) in idx.iter().enumerate() {
        if retained_rows.binary_search(&i).is_ok() {
            filtered.set_provenance(pos, Provenance::Retained);
        }
    }
    Ok((filtered, kept, out.len(), ret))
}

fn has_two_classes(d: &Dataset) -> bool {
    match d.labels() {
        Some(l) => l.iter().any(|&x| x != l[0]),
        None => false,
    }
}

/// Sweeps `thresholds`, scoring each candidate filtered set by the F1 of a
/// model retrained on it and evaluated on `mis`. `priors` must describe the
/// original dataset, before synthesis. With `retention` off, filtered-out
/// rows are simply dropped.
pub fn filter_sweep<L: Learner, M: Model + ?Sized>(
    aug: &Dataset,
    mis: &Dataset,
    m: &M,
    learner: &L,
    thresholds: &[f64],
    priors: &ClassStats,
    retention: bool,
) -> Result<FilterOutcome<L::Model>> {
    aug.require_labels()?;
    let mis_labels = mis.require_binary()?;
    if mis.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if thresholds.is_empty() {
        return Err(Error::InvalidParameter("threshold grid is empty".into()));
    }
    if let Some(&bad) = thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidThreshold(bad));
    }
    let margins = margins(m, aug)?;

    let mut table = Vec::with_capacity(thresholds.len());
    let mut best: Option<(f64, f64, Dataset, L::Model, Option<Retention>, usize)> = None;
    for &t in thresholds {
        let (filtered, kept, filtered_out, ret) = candidate(aug, &margins, t, priors, retention)?;
        let retained = ret.as_ref().map_or(0, |r| r.rows.n_rows());
        let mut row = ThresholdScore { threshold: t, f1: -1.0, kept, filtered_out, retained };
        if !filtered.is_empty() && has_two_classes(&filtered) {
            let model = learner.fit(&filtered)?;
            let f1 = f1_score(mis_labels, &predict(&model, mis, 0.5)?)?;
            row.f1 = f1;
            let better = match &best {
                None => true,
                Some((bf, bt, ..)) => f1 > *bf || (f1 == *bf && t < *bt),
            };
            if better {
                best = Some((f1, t, filtered, model, ret, filtered_out - retained));
            }
        }
        table.push(row);
    }
    let (_, chosen_threshold, filtered, model, ret, discarded) = best.ok_or(Error::AllThresholdsSkipped)?;
    let retained_counts = match ret {
        Some(r) => r.retained,
        None => priors.classes().into_iter().map(|c| (c, 0)).collect(),
    };
    Ok(FilterOutcome { filtered, chosen_threshold, table, retained_counts, discarded, margins, model })
}

//! Self-learning block: pseudo-labels for an unlabeled pool.
//!
//! * [`kfulf`] (k-fold unknown-label filtering) splits the pool into `k`
//!   folds. For each fold a fresh model is trained on the labeled rows plus
//!   the other folds under the artificial label `-1`, then predicts the held
//!   out fold; rows it does not assign to `-1` are kept with the predicted
//!   label.
//! * [`dds`] (delay-decision strategy) repeatedly pseudo-labels the most
//!   confident fraction of the pool and accepts the batch only while the
//!   retrained model's F1 on its own training pool strictly improves.
//! * [`select_strategy`] runs both and keeps the one whose enhanced set
//!   trains the better model on a separate labeled holdout.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::classifier::{predict, predict_proba, Learner};
use crate::dataset::{Dataset, Label, Provenance, ARTIFICIAL_LABEL};
use crate::error::{Error, Result};
use crate::metrics::f1_score;
use crate::util::{ceil_fraction, largest_remainder, rng};

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabelConfig {
    pub k_folds: usize,
    pub artificial_label: Label,
    /// Fraction of the remaining pool labeled per delay-decision round.
    pub target_percentage: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for PseudoLabelConfig {
    fn default() -> Self {
        Self {
            k_folds: 5,
            artificial_label: ARTIFICIAL_LABEL,
            target_percentage: 0.30,
            max_iterations: 100,
            seed: crate::DEFAULT_SEED,
        }
    }
}

impl PseudoLabelConfig {
    fn validate(&self) -> Result<()> {
        if self.k_folds < 2 {
            return Err(Error::InvalidParameter("k_folds must be at least 2".into()));
        }
        if !(self.target_percentage > 0.0 && self.target_percentage < 1.0) {
            return Err(Error::InvalidParameter("target_percentage must be in (0, 1)".into()));
        }
        if self.artificial_label == 0 || self.artificial_label == 1 {
            return Err(Error::InvalidParameter("artificial label must differ from 0 and 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Kfulf,
    Dds,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Kfulf => "kfulf",
            Strategy::Dds => "dds",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyChoice {
    Auto,
    Only(Strategy),
}

impl StrategyChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyChoice::Auto => "auto",
            StrategyChoice::Only(s) => s.as_str(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "auto" => StrategyChoice::Auto,
            "kfulf" => StrategyChoice::Only(Strategy::Kfulf),
            "dds" => StrategyChoice::Only(Strategy::Dds),
            _ => return None,
        })
    }
}

/// A pool row that received a pseudo-label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PseudoLabel {
    /// Row index in the unlabeled pool.
    pub pool_index: usize,
    pub label: Label,
    /// KFULF fold or DDS iteration (0-based) that produced the label.
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KfulfFold {
    pub fold: usize,
    /// Pool indices tested in this fold.
    pub test_rows: Vec<usize>,
    pub artificial_rows: usize,
    pub kept: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdsIteration {
    pub iteration: usize,
    pub pool_size: usize,
    pub selected: usize,
    pub f1_base: f64,
    pub f1_new: f64,
    pub accepted: bool,
    /// F1 of the retrained model on the selection holdout, when one is given.
    /// Diagnostic only; the stop rule never reads it.
    pub holdout_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IterationLog {
    Kfulf(Vec<KfulfFold>),
    Dds(Vec<DdsIteration>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfLearnOutcome {
    /// Training rows followed by the pseudo-labeled rows.
    pub enhanced: Dataset,
    pub strategy: Strategy,
    pub pseudo: Vec<PseudoLabel>,
    pub log: IterationLog,
}

impl SelfLearnOutcome {
    pub fn pseudo_count(&self) -> usize {
        self.pseudo.len()
    }

    fn unchanged(train: &Dataset, strategy: Strategy) -> Self {
        Self {
            enhanced: train.clone(),
            strategy,
            pseudo: Vec::new(),
            log: match strategy {
                Strategy::Kfulf => IterationLog::Kfulf(Vec::new()),
                Strategy::Dds => IterationLog::Dds(Vec::new()),
            },
        }
    }
}

fn append_pseudo(train: &Dataset, pool: &Dataset, pseudo: &[PseudoLabel]) -> Result<Dataset> {
    let idx: Vec<usize> = pseudo.iter().map(|p| p.pool_index).collect();
    let rows = pool
        .subset(&idx)
        .with_labels(Some(pseudo.iter().map(|p| p.label).collect()))?
        .with_provenance(Provenance::PseudoLabeled);
    train.concat(&rows)
}

/// Shuffled fold assignment of `n` pool rows; fold sizes differ by at most one.
pub fn kfulf_folds(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng(seed));
    let sizes = largest_remainder(n, &alloc::vec![1.0; k]);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for size in sizes {
        let mut fold = order[start..start + size].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += size;
    }
    folds
}

/// K-fold unknown-label filtering. Any labels on `unlabeled` are ignored.
pub fn kfulf<L: Learner>(
    train: &Dataset,
    unlabeled: &Dataset,
    learner: &L,
    cfg: &PseudoLabelConfig,
) -> Result<SelfLearnOutcome> {
    cfg.validate()?;
    train.require_binary()?;
    if unlabeled.n_features() != train.n_features() {
        return Err(Error::DimensionMismatch { expected: train.n_features(), got: unlabeled.n_features() });
    }
    if unlabeled.is_empty() {
        return Ok(SelfLearnOutcome::unchanged(train, Strategy::Kfulf));
    }
    if unlabeled.n_rows() < cfg.k_folds {
        return Err(Error::PoolTooSmall { pool: unlabeled.n_rows(), k: cfg.k_folds });
    }
    let pool = unlabeled.clone().without_labels();
    let folds = kfulf_folds(pool.n_rows(), cfg.k_folds, cfg.seed);
    let mut pseudo = Vec::new();
    let mut log = Vec::with_capacity(folds.len());
    for (k, test_rows) in folds.iter().enumerate() {
        let others: Vec<usize> = folds.iter().enumerate().filter(|(j, _)| *j != k).flat_map(|(_, f)| f.iter().copied()).collect();
        let artificial = pool
            .subset(&others)
            .with_labels(Some(alloc::vec![cfg.artificial_label; others.len()]))?;
        let model = learner.fit(&train.concat(&artificial)?)?;
        let predicted = predict(&model, &pool.subset(test_rows), 0.5)?;
        let before = pseudo.len();
        for (&row, &label) in test_rows.iter().zip(&predicted) {
            if label != cfg.artificial_label {
                pseudo.push(PseudoLabel { pool_index: row, label, round: k });
            }
        }
        log.push(KfulfFold { fold: k, test_rows: test_rows.clone(), artificial_rows: others.len(), kept: pseudo.len() - before });
    }
    Ok(SelfLearnOutcome {
        enhanced: append_pseudo(train, &pool, &pseudo)?,
        strategy: Strategy::Kfulf,
        pseudo,
        log: IterationLog::Kfulf(log),
    })
}

/// Delay-decision strategy. `holdout`, when given, is only used to log a
/// diagnostic F1 per iteration.
pub fn dds<L: Learner>(
    train: &Dataset,
    unlabeled: &Dataset,
    learner: &L,
    cfg: &PseudoLabelConfig,
    holdout: Option<&Dataset>,
) -> Result<SelfLearnOutcome> {
    cfg.validate()?;
    let train_labels = train.require_binary()?;
    if unlabeled.n_features() != train.n_features() {
        return Err(Error::DimensionMismatch { expected: train.n_features(), got: unlabeled.n_features() });
    }
    let pool = unlabeled.clone().without_labels();
    let mut model = learner.fit(train)?;
    let mut f1_base = f1_score(train_labels, &predict(&model, train, 0.5)?)?;

    let mut remaining: Vec<usize> = (0..pool.n_rows()).collect();
    let mut accepted: Vec<PseudoLabel> = Vec::new();
    let mut log = Vec::new();
    while !remaining.is_empty() && log.len() < cfg.max_iterations {
        let iteration = log.len();
        let current = pool.subset(&remaining);
        let confidence = predict_proba(&model, &current)?.confidence();
        let mut order: Vec<usize> = (0..remaining.len()).collect();
        // stable: equal confidence keeps pool order
        order.sort_by(|&a, &b| confidence[b].total_cmp(&confidence[a]));
        let take = ceil_fraction(cfg.target_percentage, remaining.len()).max(1).min(remaining.len());
        let mut top: Vec<usize> = order[..take].to_vec();
        top.sort_unstable();
        let selected_rows: Vec<usize> = top.iter().map(|&i| remaining[i]).collect();
        let labels = predict(&model, &pool.subset(&selected_rows), 0.5)?;
        let batch: Vec<PseudoLabel> = selected_rows
            .iter()
            .zip(&labels)
            .map(|(&pool_index, &label)| PseudoLabel { pool_index, label, round: iteration })
            .collect();

        let mut candidate = accepted.clone();
        candidate.extend_from_slice(&batch);
        let tmp = append_pseudo(train, &pool, &candidate)?;
        let retrained = learner.fit(&tmp)?;
        let f1_new = f1_score(tmp.require_labels()?, &predict(&retrained, &tmp, 0.5)?)?;
        let holdout_f1 = match holdout {
            Some(h) => Some(f1_score(h.require_binary()?, &predict(&retrained, h, 0.5)?)?),
            None => None,
        };
        let improved = f1_new > f1_base;
        log.push(DdsIteration {
            iteration,
            pool_size: remaining.len(),
            selected: take,
            f1_base,
            f1_new,
            accepted: improved,
            holdout_f1,
        });
        if !improved {
            break;
        }
        f1_base = f1_new;
        model = retrained;
        accepted = candidate;
        remaining.retain(|r| !selected_rows.contains(r));
    }
    Ok(SelfLearnOutcome {
        enhanced: append_pseudo(train, &pool, &accepted)?,
        strategy: Strategy::Dds,
        pseudo: accepted,
        log: IterationLog::Dds(log),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    pub outcome: SelfLearnOutcome,
    /// Holdout F1 of a model trained on each strategy's enhanced set;
    /// `None` for a strategy that was not run.
    pub kfulf_f1: Option<f64>,
    pub dds_f1: Option<f64>,
}

/// Runs the strategies allowed by `choice` and returns the one whose
/// enhanced set yields the higher F1 on `holdout` (KFULF on ties).
pub fn select_strategy<L: Learner>(
    train: &Dataset,
    unlabeled: &Dataset,
    holdout: &Dataset,
    learner: &L,
    cfg: &PseudoLabelConfig,
    choice: StrategyChoice,
) -> Result<SelectionOutcome> {
    let holdout_labels = holdout.require_binary()?;
    let score = |o: &SelfLearnOutcome| -> Result<f64> {
        let m = learner.fit(&o.enhanced)?;
        f1_score(holdout_labels, &predict(&m, holdout, 0.5)?)
    };
    let k = match choice {
        StrategyChoice::Only(Strategy::Dds) => None,
        _ => {
            let o = kfulf(train, unlabeled, learner, cfg)?;
            let f = score(&o)?;
            Some((o, f))
        }
    };
    let d = match choice {
        StrategyChoice::Only(Strategy::Kfulf) => None,
        _ => {
            let o = dds(train, unlabeled, learner, cfg, Some(holdout))?;
            let f = score(&o)?;
            Some((o, f))
        }
    };
    let kfulf_f1 = k.as_ref().map(|x| x.1);
    let dds_f1 = d.as_ref().map(|x| x.1);
    let outcome = match (k, d) {
        (Some((ko, kf)), Some((dout, df))) => {
            if df > kf {
                dout
            } else {
                ko
            }
        }
        (Some((o, _)), None) | (None, Some((o, _))) => o,
        (None, None) => unreachable!("at least one strategy always runs"),
    };
    Ok(SelectionOutcome { outcome, kfulf_f1, dds_f1 })
}

//! Binary classification metrics. The positive class is label `1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::classifier::{predict_proba, Model};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn check_binary(values: &[Label]) -> Result<()> {
    match values.iter().find(|&&v| v != 0 && v != 1) {
        Some(&bad) => Err(Error::NonBinaryLabel(bad)),
        None => Ok(()),
    }
}

pub fn confusion(labels: &[Label], predictions: &[Label]) -> Result<ConfusionCounts> {
    if labels.len() != predictions.len() {
        return Err(Error::LengthMismatch { left: labels.len(), right: predictions.len() });
    }
    check_binary(labels)?;
    check_binary(predictions)?;
    let mut c = ConfusionCounts::default();
    for (&y, &p) in labels.iter().zip(predictions) {
        match (y, p) {
            (1, 1) => c.tp += 1,
            (0, 0) => c.tn += 1,
            (0, 1) => c.fp += 1,
            _ => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// `(precision, recall, f1)`; any zero denominator yields 0.
pub fn precision_recall_f1(c: &ConfusionCounts) -> (f64, f64, f64) {
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    (precision, recall, f1)
}

pub fn f1_score(labels: &[Label], predictions: &[Label]) -> Result<f64> {
    Ok(precision_recall_f1(&confusion(labels, predictions)?).2)
}

/// Cumulative `(tp, fp)` after each group of equal scores, walking from the
/// highest score down. The implicit starting point `(0, 0)` is the `+inf`
/// threshold.
fn roc_steps(labels: &[Label], scores: &[f64]) -> Result<(Vec<(usize, usize)>, usize, usize)> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch { left: labels.len(), right: scores.len() });
    }
    check_binary(labels)?;
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScore(i));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::MissingClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut steps = Vec::new();
    let (mut tp, mut fp) = (0, 0);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        steps.push((tp, fp));
    }
    Ok((steps, pos, neg))
}

/// Trapezoidal area under the ROC curve over all distinct score thresholds.
/// Tied positive/negative pairs contribute one half.
pub fn auc(labels: &[Label], scores: &[f64]) -> Result<f64> {
    let (steps, pos, neg) = roc_steps(labels, scores)?;
    // twice the area in units of one pos/neg pair; exact in integers
    let mut twice: u128 = 0;
    let (mut prev_tp, mut prev_fp) = (0usize, 0usize);
    for (tp, fp) in steps {
        twice += ((fp - prev_fp) * (tp + prev_tp)) as u128;
        prev_tp = tp;
        prev_fp = fp;
    }
    Ok(twice as f64 / (2.0 * pos as f64 * neg as f64))
}

/// Maximum of `TPR - FPR` over all thresholds (including `+inf`, where both
/// rates are zero).
pub fn ks_statistic(labels: &[Label], scores: &[f64]) -> Result<f64> {
    let (steps, pos, neg) = roc_steps(labels, scores)?;
    Ok(steps
        .iter()
        .map(|&(tp, fp)| tp as f64 / pos as f64 - fp as f64 / neg as f64)
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub auc: f64,
    pub ks: f64,
    pub counts: ConfusionCounts,
    pub threshold: f64,
}

pub const REPORT_COLUMNS: [&str; 10] = ["precision", "recall", "f1", "accuracy", "auc", "ks", "tp", "tn", "fp", "fn"];

impl EvalReport {
    /// Scores every metric from labels and `p(y = 1)` scores; predictions are
    /// `score >= threshold`.
    pub fn from_scores(labels: &[Label], scores: &[f64], threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidThreshold(threshold));
        }
        let predictions: Vec<Label> = scores.iter().map(|&s| Label::from(s >= threshold)).collect();
        let counts = confusion(labels, &predictions)?;
        let (precision, recall, f1) = precision_recall_f1(&counts);
        Ok(Self {
            precision,
            recall,
            f1,
            accuracy: counts.accuracy(),
            auc: auc(labels, scores)?,
            ks: ks_statistic(labels, scores)?,
            counts,
            threshold,
        })
    }

    /// Metric values in [`REPORT_COLUMNS`] order.
    pub fn values(&self) -> [f64; 10] {
        let c = &self.counts;
        [
            self.precision,
            self.recall,
            self.f1,
            self.accuracy,
            self.auc,
            self.ks,
            c.tp as f64,
            c.tn as f64,
            c.fp as f64,
            c.fn_ as f64,
        ]
    }

    /// `key = value` lines.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        for (k, v) in REPORT_COLUMNS.iter().zip(self.values()) {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "threshold = {}", self.threshold);
        s
    }

    pub fn csv_header() -> String {
        REPORT_COLUMNS.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        let v: Vec<String> = self.values().iter().map(|x| format!("{x}")).collect();
        v.join(",")
    }
}

/// Evaluates `m` on a binary-labeled test set. Threshold metrics come from
/// the decision rule at `threshold`; AUC and KS use `p(y = 1)`.
pub fn evaluate<M: Model + ?Sized>(m: &M, test: &Dataset, threshold: f64) -> Result<EvalReport> {
    let labels = test.require_binary()?;
    let scores = predict_proba(m, test)?.column(1)?;
    EvalReport::from_scores(labels, &scores, threshold)
}

/// Mean and sample standard deviation of each metric across reports.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub mean: [f64; 10],
    pub std: [f64; 10],
    pub n: usize,
}

impl MetricSummary {
    pub fn of(reports: &[EvalReport]) -> Self {
        let mut mean = [0.0; 10];
        let mut std = [0.0; 10];
        for k in 0..10 {
            let values: Vec<f64> = reports.iter().map(|r| r.values()[k]).collect();
            let (m, s) = crate::util::mean_std(&values);
            mean[k] = m;
            std[k] = s;
        }
        Self { mean, std, n: reports.len() }
    }

    pub fn mean_of(&self, metric: &str) -> Option<f64> {
        REPORT_COLUMNS.iter().position(|c| *c == metric).map(|i| self.mean[i])
    }

    pub fn std_of(&self, metric: &str) -> Option<f64> {
        REPORT_COLUMNS.iter().position(|c| *c == metric).map(|i| self.std[i])
    }
}

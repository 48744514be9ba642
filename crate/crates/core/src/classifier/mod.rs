//! Probabilistic classifiers behind a small train / predict-probability
//! contract.
//!
//! Every enhancement block only needs two things from a classifier: a way to
//! fit it on a labeled [`Dataset`] ([`Learner`]) and class probabilities for
//! new rows ([`Model`]). [`ClassifierSpec`] is the built-in learner; tests
//! plug in stub learners through the same traits.

mod forest;
mod logistic;
mod tree;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use forest::RandomForest;
pub use logistic::LogisticRegression;
pub use tree::DecisionTree;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

/// A fitted classifier.
pub trait Model {
    /// Labels seen at fit time, ascending. Probability rows follow this order.
    fn labels(&self) -> &[Label];
    fn n_features(&self) -> usize;
    /// Writes the class probabilities of `row` into `out`
    /// (`out.len() == self.labels().len()`).
    fn row_proba(&self, row: &[f64], out: &mut [f64]);
}

/// Something that can be fitted on a labeled dataset.
pub trait Learner {
    type Model: Model;
    fn fit(&self, train: &Dataset) -> Result<Self::Model>;
}

impl<L: Learner + ?Sized> Learner for &L {
    type Model = L::Model;
    fn fit(&self, train: &Dataset) -> Result<Self::Model> {
        (**self).fit(train)
    }
}

/// Row-major `n x labels.len()` probability matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Probabilities {
    labels: Vec<Label>,
    values: Vec<f64>,
}

impl Probabilities {
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn n_rows(&self) -> usize {
        if self.labels.is_empty() {
            0
        } else {
            self.values.len() / self.labels.len()
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.labels.len();
        &self.values[i * w..(i + 1) * w]
    }

    /// Probability of `label` for every row.
    pub fn column(&self, label: Label) -> Result<Vec<f64>> {
        let c = self.labels.iter().position(|&l| l == label).ok_or(Error::UnknownLabel(label))?;
        Ok((0..self.n_rows()).map(|i| self.row(i)[c]).collect())
    }

    /// Decision rule. With label set `{0, 1}` a row is class 1 iff
    /// `p(1) >= threshold`; otherwise the most probable label wins, ties
    /// going to the smaller label.
    pub fn decide(&self, threshold: f64) -> Result<Vec<Label>> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidThreshold(threshold));
        }
        let binary = self.labels == [0, 1];
        Ok((0..self.n_rows())
            .map(|i| {
                let row = self.row(i);
                if binary {
                    Label::from(row[1] >= threshold)
                } else {
                    self.labels[argmax(row)]
                }
            })
            .collect())
    }

    /// Largest probability in each row.
    pub fn confidence(&self) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.row(i).iter().copied().fold(0.0, f64::max)).collect()
    }
}

/// Index of the first maximum.
pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

pub fn predict_proba<M: Model + ?Sized>(m: &M, x: &Dataset) -> Result<Probabilities> {
    if x.n_features() != m.n_features() {
        return Err(Error::DimensionMismatch { expected: m.n_features(), got: x.n_features() });
    }
    let w = m.labels().len();
    let mut values = alloc::vec![0.0; x.n_rows() * w];
    for (i, row) in x.rows().enumerate() {
        m.row_proba(row, &mut values[i * w..(i + 1) * w]);
    }
    Ok(Probabilities { labels: m.labels().to_vec(), values })
}

/// Class predictions; see [`Probabilities::decide`] for the rule.
pub fn predict<M: Model + ?Sized>(m: &M, x: &Dataset, threshold: f64) -> Result<Vec<Label>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    predict_proba(m, x)?.decide(threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassifierKind {
    DecisionTree,
    RandomForest,
    LogisticRegression,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::DecisionTree => "decision-tree",
            ClassifierKind::RandomForest => "random-forest",
            ClassifierKind::LogisticRegression => "logistic-regression",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "decision-tree" | "dt" => ClassifierKind::DecisionTree,
            "random-forest" | "rf" => ClassifierKind::RandomForest,
            "logistic-regression" | "lr" => ClassifierKind::LogisticRegression,
            _ => return None,
        })
    }
}

/// Features considered at each forest split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxFeatures {
    /// `max(1, floor(sqrt(d)))`
    Sqrt,
    All,
}

impl MaxFeatures {
    pub(crate) fn resolve(self, d: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => (libm::floor(libm::sqrt(d as f64)) as usize).max(1),
            MaxFeatures::All => d,
        }
    }
}

/// Classifier choice and hyperparameters. Fields that do not apply to the
/// chosen kind are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub max_depth: usize,
    pub n_estimators: usize,
    pub bootstrap: bool,
    pub max_features: MaxFeatures,
    /// Added to every class count in a tree leaf.
    pub leaf_smoothing: f64,
    pub learning_rate: f64,
    pub n_iterations: usize,
    pub seed: u64,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        Self {
            kind: ClassifierKind::DecisionTree,
            max_depth: 12,
            n_estimators: 50,
            bootstrap: true,
            max_features: MaxFeatures::Sqrt,
            leaf_smoothing: 1.0,
            learning_rate: 0.1,
            n_iterations: 500,
            seed: crate::DEFAULT_SEED,
        }
    }
}

impl ClassifierSpec {
    pub fn of_kind(kind: ClassifierKind) -> Self {
        Self { kind, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        match self.kind {
            ClassifierKind::DecisionTree | ClassifierKind::RandomForest if self.max_depth == 0 => {
                bad("max_depth must be positive")
            }
            ClassifierKind::RandomForest if self.n_estimators == 0 => bad("n_estimators must be positive"),
            _ if !(self.leaf_smoothing >= 0.0) => bad("leaf_smoothing must be nonnegative"),
            ClassifierKind::LogisticRegression if !(self.learning_rate > 0.0) => {
                bad("learning_rate must be positive")
            }
            _ => Ok(()),
        }
    }
}

/// Labeled training data in the shape the fitting code wants: sorted label
/// set and each row's class index into it.
pub(crate) struct TrainingView<'a> {
    pub data: &'a Dataset,
    pub labels: Vec<Label>,
    pub classes: Vec<usize>,
}

impl<'a> TrainingView<'a> {
    pub fn new(data: &'a Dataset) -> Result<Self> {
        let y = data.require_labels()?;
        if data.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let labels = data.label_set()?;
        if labels.len() < 2 {
            return Err(Error::SingleClass);
        }
        let classes = y.iter().map(|l| labels.binary_search(l).unwrap_or(0)).collect();
        Ok(Self { data, labels, classes })
    }
}

/// A fitted built-in classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrainedModel {
    Tree(DecisionTree),
    Forest(RandomForest),
    Logistic(LogisticRegression),
}

impl Model for TrainedModel {
    fn labels(&self) -> &[Label] {
        match self {
            TrainedModel::Tree(m) => m.labels(),
            TrainedModel::Forest(m) => m.labels(),
            TrainedModel::Logistic(m) => m.labels(),
        }
    }

    fn n_features(&self) -> usize {
        match self {
            TrainedModel::Tree(m) => m.n_features(),
            TrainedModel::Forest(m) => m.n_features(),
            TrainedModel::Logistic(m) => m.n_features(),
        }
    }

    fn row_proba(&self, row: &[f64], out: &mut [f64]) {
        match self {
            TrainedModel::Tree(m) => m.row_proba(row, out),
            TrainedModel::Forest(m) => m.row_proba(row, out),
            TrainedModel::Logistic(m) => m.row_proba(row, out),
        }
    }
}

impl Learner for ClassifierSpec {
    type Model = TrainedModel;

    fn fit(&self, train: &Dataset) -> Result<TrainedModel> {
        self.validate()?;
        let view = TrainingView::new(train)?;
        Ok(match self.kind {
            ClassifierKind::DecisionTree => TrainedModel::Tree(DecisionTree::fit(
                &view,
                &tree::TreeParams { max_depth: self.max_depth, max_features: None, smoothing: self.leaf_smoothing },
            )),
            ClassifierKind::RandomForest => TrainedModel::Forest(RandomForest::fit(&view, self)),
            ClassifierKind::LogisticRegression => TrainedModel::Logistic(LogisticRegression::fit(
                &view,
                self.learning_rate,
                self.n_iterations,
            )),
        })
    }
}

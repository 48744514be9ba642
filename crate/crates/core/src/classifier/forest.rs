//! Bagged decision trees averaged by class probability.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use super::{ClassifierSpec, Model, TrainingView};
use crate::dataset::Label;
use crate::util::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    labels: Vec<Label>,
    n_features: usize,
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Tree `i` is grown from its own generator seeded with `seed + i`, which
    /// draws the bootstrap sample (size n, with replacement) and the
    /// per-split feature subsets.
    pub(crate) fn fit(view: &TrainingView<'_>, spec: &ClassifierSpec) -> Self {
        let n = view.data.n_rows();
        let d = view.data.n_features();
        let params = TreeParams {
            max_depth: spec.max_depth,
            max_features: Some(spec.max_features.resolve(d)),
            smoothing: spec.leaf_smoothing,
        };
        let trees = (0..spec.n_estimators)
            .map(|t| {
                let mut rng = rng(spec.seed.wrapping_add(t as u64));
                let samples: Vec<usize> = if spec.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_samples(view, &params, &samples, Some(&mut rng))
            })
            .collect();
        Self { labels: view.labels.clone(), n_features: d, trees }
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }
}

impl Model for RandomForest {
    fn labels(&self) -> &[Label] {
        &self.labels
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn row_proba(&self, row: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut buf = alloc::vec![0.0; out.len()];
        for t in &self.trees {
            t.row_proba(row, &mut buf);
            out.iter_mut().zip(&buf).for_each(|(o, b)| *o += b);
        }
        let m = self.trees.len() as f64;
        out.iter_mut().for_each(|v| *v /= m);
    }
}

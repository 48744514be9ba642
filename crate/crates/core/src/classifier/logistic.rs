//! Logistic regression trained by full-batch gradient descent on
//! standardized features. More than two labels are handled one-vs-rest with
//! the per-label scores normalised to sum to one.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Model, TrainingView};
use crate::dataset::{Dataset, Label};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    labels: Vec<Label>,
    means: Vec<f64>,
    scales: Vec<f64>,
    /// One `[w_0 .. w_{d-1}, bias]` vector per binary sub-model. A single
    /// entry scores `labels[1]` against `labels[0]`.
    weights: Vec<Vec<f64>>,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// Binary cross-entropy for logit `z` and target `y` in {0, 1}.
fn log_loss(z: f64, y: f64) -> f64 {
    libm::log1p(libm::exp(-libm::fabs(z))) + z.max(0.0) - y * z
}

struct Standardized {
    means: Vec<f64>,
    scales: Vec<f64>,
    rows: Vec<f64>,
    d: usize,
}

fn standardize(data: &Dataset) -> Standardized {
    let n = data.n_rows() as f64;
    let d = data.n_features();
    let mut means = alloc::vec![0.0; d];
    for row in data.rows() {
        means.iter_mut().zip(row).for_each(|(m, v)| *m += v / n);
    }
    let mut scales = alloc::vec![0.0; d];
    for row in data.rows() {
        scales.iter_mut().zip(row.iter().zip(&means)).for_each(|(s, (v, m))| *s += (v - m) * (v - m) / n);
    }
    for s in &mut scales {
        *s = libm::sqrt(*s);
        if *s <= 1e-12 {
            *s = 1.0;
        }
    }
    let rows = data
        .rows()
        .flat_map(|row| row.iter().zip(means.iter().zip(&scales)).map(|(v, (m, s))| (v - m) / s).collect::<Vec<_>>())
        .collect();
    Standardized { means, scales, rows, d }
}

fn logit(w: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[d]
}

/// Gradient descent on the mean cross-entropy. Returns the weights and the
/// loss before every update followed by the final loss.
fn descend(z: &Standardized, targets: &[f64], lr: f64, iterations: usize) -> (Vec<f64>, Vec<f64>) {
    let d = z.d;
    let n = targets.len() as f64;
    let mut w = alloc::vec![0.0; d + 1];
    let mut grad = alloc::vec![0.0; d + 1];
    let mut trace = Vec::with_capacity(iterations + 1);
    for _ in 0..=iterations {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        for (row, &y) in z.rows.chunks_exact(d.max(1)).zip(targets) {
            let row = &row[..d];
            let s = logit(&w, row);
            loss += log_loss(s, y);
            let err = sigmoid(s) - y;
            grad[..d].iter_mut().zip(row).for_each(|(g, x)| *g += err * x);
            grad[d] += err;
        }
        trace.push(loss / n);
        if trace.len() > iterations {
            break;
        }
        w.iter_mut().zip(&grad).for_each(|(wi, g)| *wi -= lr * g / n);
    }
    (w, trace)
}

impl LogisticRegression {
    pub(crate) fn fit(view: &TrainingView<'_>, lr: f64, iterations: usize) -> Self {
        Self::fit_traced(view, lr, iterations).0
    }

    fn fit_traced(view: &TrainingView<'_>, lr: f64, iterations: usize) -> (Self, Vec<Vec<f64>>) {
        let z = standardize(view.data);
        let targets_for = |class: usize| -> Vec<f64> {
            view.classes.iter().map(|&c| if c == class { 1.0 } else { 0.0 }).collect()
        };
        let models: Vec<usize> = if view.labels.len() == 2 { alloc::vec![1] } else { (0..view.labels.len()).collect() };
        let mut weights = Vec::new();
        let mut traces = Vec::new();
        for class in models {
            let (w, trace) = descend(&z, &targets_for(class), lr, iterations);
            weights.push(w);
            traces.push(trace);
        }
        let m = Self { labels: view.labels.clone(), means: z.means, scales: z.scales, weights };
        (m, traces)
    }

    /// Fits and also returns the training cross-entropy before each
    /// gradient step plus the final value, one trace per binary sub-model.
    pub fn fit_with_loss_trace(train: &Dataset, lr: f64, iterations: usize) -> Result<(Self, Vec<Vec<f64>>)> {
        let view = TrainingView::new(train)?;
        Ok(Self::fit_traced(&view, lr, iterations))
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }
}

impl Model for LogisticRegression {
    fn labels(&self) -> &[Label] {
        &self.labels
    }

    fn n_features(&self) -> usize {
        self.means.len()
    }

    fn row_proba(&self, row: &[f64], out: &mut [f64]) {
        let x: Vec<f64> = row.iter().zip(self.means.iter().zip(&self.scales)).map(|(v, (m, s))| (v - m) / s).collect();
        if self.weights.len() == 1 {
            let p = sigmoid(logit(&self.weights[0], &x));
            out[0] = 1.0 - p;
            out[1] = p;
            return;
        }
        let mut total = 0.0;
        for (o, w) in out.iter_mut().zip(&self.weights) {
            *o = sigmoid(logit(w, &x));
            total += *o;
        }
        if total > 0.0 {
            out.iter_mut().for_each(|o| *o /= total);
        } else {
            let k = out.len() as f64;
            out.iter_mut().for_each(|o| *o = 1.0 / k);
        }
    }
}

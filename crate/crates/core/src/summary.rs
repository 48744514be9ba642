//! Per-stage distribution summaries: row counts, class counts, provenance
//! counts and per-feature mean and standard deviation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::dataset::{Dataset, Label, Provenance};
use crate::util::mean_std;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSummary {
    pub name: String,
    pub mean: f64,
    /// Sample standard deviation; 0 for fewer than two rows.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageSummary {
    pub stage: String,
    pub rows: usize,
    pub class_counts: BTreeMap<Label, usize>,
    pub provenance_counts: Vec<(Provenance, usize)>,
    pub features: Vec<FeatureSummary>,
}

const PROVENANCES: [Provenance; 5] = [
    Provenance::Original,
    Provenance::Synthetic,
    Provenance::Retained,
    Provenance::PseudoLabeled,
    Provenance::ValidationMerged,
];

impl StageSummary {
    pub fn of(stage: &str, d: &Dataset) -> Self {
        let mut class_counts = BTreeMap::new();
        if let Some(labels) = d.labels() {
            for &l in labels {
                *class_counts.entry(l).or_insert(0) += 1;
            }
        }
        let provenance_counts = PROVENANCES
            .iter()
            .map(|&p| (p, d.provenance().iter().filter(|&&q| q == p).count()))
            .collect();
        let features = (0..d.n_features())
            .map(|j| {
                let col: Vec<f64> = (0..d.n_rows()).map(|i| d.value(i, j)).collect();
                let (mean, std) = mean_std(&col);
                FeatureSummary { name: d.column_names()[j].clone(), mean, std }
            })
            .collect();
        Self { stage: stage.into(), rows: d.n_rows(), class_counts, provenance_counts, features }
    }

    /// Human-readable block, one fact per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[{}]", self.stage);
        let _ = writeln!(s, "rows = {}", self.rows);
        for (l, c) in &self.class_counts {
            let _ = writeln!(s, "class {l} = {c}");
        }
        for (p, c) in &self.provenance_counts {
            if *c > 0 {
                let _ = writeln!(s, "provenance {p} = {c}");
            }
        }
        for f in &self.features {
            let _ = writeln!(s, "feature {} mean = {} std = {}", f.name, fmt_f(f.mean), fmt_f(f.std));
        }
        s
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

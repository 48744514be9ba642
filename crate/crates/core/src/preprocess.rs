//! Missing-value handling and label encoding of raw string tables.
//!
//! Rules, applied per column:
//!
//! * a cell is missing when it is empty or reads `NA`/`NaN` (any case);
//! * columns whose missing fraction is strictly greater than the drop
//!   threshold (default 0.5) are removed;
//! * remaining missing cells are filled with the column mode (smallest value
//!   wins numeric ties, first appearance wins categorical ties);
//! * string columns are label-encoded to `0, 1, 2, ...` in order of first
//!   appearance.
//!
//! The label column is mapped to `{0, 1}` with the minority value as `1`
//! unless a positive value is given explicitly.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dataset::{ColumnKind, Dataset, Label};
use crate::error::{Error, Result};

/// A parsed but unprocessed table. `None` cells are missing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawDataset {
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
    pub labels: Option<Vec<Option<String>>>,
    /// Optional per-column override of kind inference.
    pub kind_hints: Vec<Option<ColumnKind>>,
}

impl RawDataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Converts a processed dataset back into raw string form. Encoded
    /// categorical codes are plain numbers by now, so every column is hinted
    /// numeric; re-encoding them by first appearance would renumber codes.
    pub fn from_dataset(d: &Dataset) -> Self {
        Self {
            column_names: d.column_names().to_vec(),
            rows: d.rows().map(|r| r.iter().map(|v| Some(v.to_string())).collect()).collect(),
            labels: d.labels().map(|l| l.iter().map(|v| Some(v.to_string())).collect()),
            kind_hints: alloc::vec![Some(ColumnKind::Numeric); d.n_features()],
        }
    }

    fn hint(&self, column: usize) -> Option<ColumnKind> {
        self.kind_hints.get(column).copied().flatten()
    }
}

/// True for the cell spellings treated as missing.
pub fn is_missing_marker(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessOptions {
    /// Columns with a missing fraction strictly above this are dropped.
    pub missing_drop_threshold: f64,
    /// Raw label value mapped to class 1; the minority value when `None`.
    pub positive_label: Option<String>,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self { missing_drop_threshold: 0.5, positive_label: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ColumnRule {
    Numeric { fill: f64 },
    Categorical { codes: Vec<String>, fill: usize },
}

#[derive(Debug, Clone, PartialEq)]
struct ColumnPlan {
    source: usize,
    name: String,
    rule: ColumnRule,
}

/// Fitted preprocessing: which columns survive, their fill values and
/// encodings, and the label mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessPlan {
    source_columns: Vec<String>,
    columns: Vec<ColumnPlan>,
    dropped: Vec<String>,
    positive: Option<String>,
    negative: Option<String>,
}

fn parse_numeric(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

impl PreprocessPlan {
    /// Fits the plan on the union of `tables`, which must share column names.
    pub fn fit(tables: &[&RawDataset], opts: &PreprocessOptions) -> Result<Self> {
        let first = tables.first().ok_or(Error::EmptyDataset)?;
        for t in tables {
            if t.column_names != first.column_names {
                return Err(Error::Schema("tables have different feature columns".into()));
            }
            if let Some(bad) = t.rows.iter().find(|r| r.len() != first.column_names.len()) {
                return Err(Error::DimensionMismatch { expected: first.column_names.len(), got: bad.len() });
            }
        }
        let total_rows: usize = tables.iter().map(|t| t.n_rows()).sum();
        if total_rows == 0 {
            return Err(Error::EmptyDataset);
        }

        let mut columns = Vec::new();
        let mut dropped = Vec::new();
        for (c, name) in first.column_names.iter().enumerate() {
            let cells = || tables.iter().flat_map(move |t| t.rows.iter().map(move |r| r[c].as_deref()));
            let missing = cells().filter(|v| v.is_none_or(is_missing_marker)).count();
            if missing as f64 / total_rows as f64 > opts.missing_drop_threshold {
                dropped.push(name.clone());
                continue;
            }
            let present = || cells().flatten().filter(|v| !is_missing_marker(v));
            let hint = tables.iter().find_map(|t| t.hint(c));
            let numeric = match hint {
                Some(ColumnKind::Numeric) => {
                    if let Some(bad) = present().find(|v| parse_numeric(v).is_none()) {
                        return Err(Error::Column {
                            column: name.clone(),
                            message: format!("value `{bad}` is not a finite number"),
                        });
                    }
                    true
                }
                Some(ColumnKind::Categorical) => false,
                None => present().all(|v| parse_numeric(v).is_some()),
            };
            let rule = if numeric {
                let mut values: Vec<f64> = present().filter_map(parse_numeric).collect();
                values.sort_by(f64::total_cmp);
                ColumnRule::Numeric { fill: numeric_mode(&values) }
            } else {
                let mut codes: Vec<String> = Vec::new();
                let mut index: BTreeMap<&str, usize> = BTreeMap::new();
                let mut counts: Vec<usize> = Vec::new();
                for v in present() {
                    let v = v.trim();
                    let code = *index.entry(v).or_insert_with(|| {
                        codes.push(v.to_string());
                        counts.push(0);
                        codes.len() - 1
                    });
                    counts[code] += 1;
                }
                // max_by keeps the last maximum; iterate in reverse so the
                // earliest code wins ties
                let fill = (0..counts.len()).rev().max_by_key(|&i| counts[i]).unwrap_or(0);
                ColumnRule::Categorical { codes, fill }
            };
            columns.push(ColumnPlan { source: c, name: name.clone(), rule });
        }
        if columns.is_empty() {
            return Err(Error::AllColumnsDropped);
        }

        let (positive, negative) = fit_label_map(tables, opts)?;
        Ok(Self {
            source_columns: first.column_names.clone(),
            columns,
            dropped,
            positive,
            negative,
        })
    }

    pub fn dropped_columns(&self) -> &[String] {
        &self.dropped
    }

    pub fn kept_columns(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    /// Raw label value mapped to class 1.
    pub fn positive_label(&self) -> Option<&str> {
        self.positive.as_deref()
    }

    pub fn negative_label(&self) -> Option<&str> {
        self.negative.as_deref()
    }

    /// Applies the plan. Output rows carry their row index as origin.
    pub fn apply(&self, raw: &RawDataset) -> Result<Dataset> {
        if raw.column_names != self.source_columns {
            return Err(Error::Schema("table columns differ from the fitted columns".into()));
        }
        let d = self.columns.len();
        let mut features = Vec::with_capacity(raw.n_rows() * d);
        for row in &raw.rows {
            if row.len() != self.source_columns.len() {
                return Err(Error::DimensionMismatch { expected: self.source_columns.len(), got: row.len() });
            }
            for col in &self.columns {
                let cell = row[col.source].as_deref().filter(|v| !is_missing_marker(v));
                let value = match (&col.rule, cell) {
                    (ColumnRule::Numeric { fill }, None) => *fill,
                    (ColumnRule::Numeric { .. }, Some(v)) => parse_numeric(v).ok_or_else(|| Error::Column {
                        column: col.name.clone(),
                        message: format!("value `{v}` is not a finite number"),
                    })?,
                    (ColumnRule::Categorical { fill, .. }, None) => *fill as f64,
                    (ColumnRule::Categorical { codes, .. }, Some(v)) => {
                        let v = v.trim();
                        codes.iter().position(|c| c == v).ok_or_else(|| Error::Column {
                            column: col.name.clone(),
                            message: format!("unseen category `{v}`"),
                        })? as f64
                    }
                };
                features.push(value);
            }
        }
        let labels = match &raw.labels {
            None => None,
            Some(raw_labels) => Some(
                raw_labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| self.map_label(i, l.as_deref()))
                    .collect::<Result<Vec<Label>>>()?,
            ),
        };
        let names = self.columns.iter().map(|c| c.name.clone()).collect();
        let kinds = self
            .columns
            .iter()
            .map(|c| match c.rule {
                ColumnRule::Numeric { .. } => ColumnKind::Numeric,
                ColumnRule::Categorical { .. } => ColumnKind::Categorical,
            })
            .collect();
        Ok(Dataset::from_flat(names, kinds, features, labels)?.with_origin_indices())
    }

    fn map_label(&self, row: usize, value: Option<&str>) -> Result<Label> {
        let v = value.filter(|v| !is_missing_marker(v)).ok_or_else(|| Error::Column {
            column: "label".into(),
            message: format!("missing label at row {row}"),
        })?;
        let v = v.trim();
        if Some(v) == self.positive.as_deref() {
            Ok(1)
        } else if Some(v) == self.negative.as_deref() {
            Ok(0)
        } else {
            Err(Error::Column { column: "label".into(), message: format!("unexpected label `{v}`") })
        }
    }
}

fn numeric_mode(sorted: &[f64]) -> f64 {
    let mut best = (0usize, 0.0);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        // strict > keeps the smallest value among equally frequent ones
        if j - i > best.0 {
            best = (j - i, sorted[i]);
        }
        i = j;
    }
    best.1
}

fn fit_label_map(tables: &[&RawDataset], opts: &PreprocessOptions) -> Result<(Option<String>, Option<String>)> {
    let mut values: Vec<String> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut any_labels = false;
    for t in tables {
        let Some(labels) = &t.labels else { continue };
        any_labels = true;
        for l in labels.iter().flatten() {
            if is_missing_marker(l) {
                continue;
            }
            let l = l.trim();
            match values.iter().position(|v| v == l) {
                Some(i) => counts[i] += 1,
                None => {
                    values.push(l.to_string());
                    counts.push(1);
                }
            }
        }
    }
    if !any_labels {
        return Ok((opts.positive_label.clone(), None));
    }
    if values.len() > 2 {
        return Err(Error::Column {
            column: "label".into(),
            message: format!("{} distinct labels; only binary data is supported", values.len()),
        });
    }
    let positive = match &opts.positive_label {
        Some(p) => {
            if !values.iter().any(|v| v == p) {
                return Err(Error::Column { column: "label".into(), message: format!("positive label `{p}` not present") });
            }
            p.clone()
        }
        None => {
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| counts[a].cmp(&counts[b]).then_with(|| label_order(&values[b], &values[a])));
            values[order[0]].clone()
        }
    };
    let negative = values.into_iter().find(|v| *v != positive);
    Ok((Some(positive), negative))
}

/// Numeric comparison when both parse, otherwise lexicographic.
fn label_order(a: &str, b: &str) -> core::cmp::Ordering {
    match (parse_numeric(a), parse_numeric(b)) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    }
}

/// Fits a plan on `raw` alone and applies it.
pub fn preprocess(raw: &RawDataset, opts: &PreprocessOptions) -> Result<Dataset> {
    PreprocessPlan::fit(&[raw], opts)?.apply(raw)
}

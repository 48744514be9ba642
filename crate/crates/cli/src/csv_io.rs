//! CSV reading and writing.
//!
//! Input files have a header row. The label column is taken out of the
//! feature columns; a column named `provenance` (as written by `enhance`) is
//! ignored so that enhanced files can be fed back in.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use trienhance_core::preprocess::is_missing_marker;
use trienhance_core::{Dataset, RawDataset};

pub const PROVENANCE_COLUMN: &str = "provenance";

/// Reads a CSV into a raw table. With `require_label` the label column must
/// exist; otherwise a missing label column yields an unlabeled table.
pub fn read_raw(path: &Path, label_column: &str, require_label: bool) -> Result<RawDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = headers.iter().position(|h| h == label_column);
    if require_label && label_idx.is_none() {
        bail!("{}: no label column `{}`", path.display(), label_column);
    }
    let keep: Vec<usize> = (0..headers.len())
        .filter(|&i| Some(i) != label_idx && headers[i] != PROVENANCE_COLUMN)
        .collect();
    let mut rows = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    for (n, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: bad record {}", path.display(), n + 1))?;
        let cell = |i: usize| {
            let v = &record[i];
            (!is_missing_marker(v)).then(|| v.to_string())
        };
        rows.push(keep.iter().map(|&i| cell(i)).collect());
        if let (Some(l), Some(i)) = (labels.as_mut(), label_idx) {
            l.push(cell(i));
        }
    }
    Ok(RawDataset {
        column_names: keep.iter().map(|&i| headers[i].clone()).collect(),
        rows,
        labels,
        kind_hints: Vec::new(),
    })
}

/// Writes feature columns, the label column (when labeled) and, if asked, a
/// provenance column.
pub fn write_dataset(path: &Path, d: &Dataset, label_column: &str, provenance: bool) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header: Vec<&str> = d.column_names().iter().map(String::as_str).collect();
    if d.labels().is_some() {
        header.push(label_column);
    }
    if provenance {
        header.push(PROVENANCE_COLUMN);
    }
    w.write_record(&header)?;
    for i in 0..d.n_rows() {
        let mut rec: Vec<String> = d.row(i).iter().map(|v| v.to_string()).collect();
        if let Some(l) = d.labels() {
            rec.push(l[i].to_string());
        }
        if provenance {
            rec.push(d.provenance()[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

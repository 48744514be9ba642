//! Report files written by `enhance` and `benchmark`.
//!
//! Nothing written here depends on wall-clock time, so identical runs give
//! identical files. Stage timings are printed by the binary instead.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use trienhance_core::metrics::{MetricSummary, REPORT_COLUMNS};
use trienhance_core::pipeline::{BenchmarkReport, EnhancementResult};
use trienhance_core::selflearn::IterationLog;
use trienhance_core::{EvalReport, PreprocessPlan};

use crate::config::Settings;
use crate::csv_io::{write_dataset, write_text};

pub const ENHANCED_CSV: &str = "enhanced.csv";
pub const SUMMARY_TXT: &str = "summary.txt";
pub const SYNTHESIS_CSV: &str = "synthesis_f1.csv";
pub const THRESHOLDS_CSV: &str = "filter_thresholds.csv";
pub const SELFLEARN_CSV: &str = "selflearning_log.csv";
pub const METRICS_CSV: &str = "metrics.csv";
pub const CONFIG_TXT: &str = "config.txt";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn summary_text(result: &EnhancementResult, plan: Option<&PreprocessPlan>) -> String {
    let mut s = String::new();
    if let Some(plan) = plan {
        let _ = writeln!(s, "positive_label = {}", plan.positive_label().unwrap_or(""));
        let _ = writeln!(s, "negative_label = {}", plan.negative_label().unwrap_or(""));
        let _ = writeln!(s, "dropped_columns = {}", plan.dropped_columns().join(", "));
    }
    let _ = writeln!(s, "labeled_rows = {}", result.labeled.n_rows());
    let _ = writeln!(s, "augmented_rows = {}", result.augmented.n_rows());
    let _ = writeln!(s, "filtered_rows = {}", result.filtered.n_rows());
    let _ = writeln!(s, "enhanced_rows = {}", result.enhanced.n_rows());
    match &result.synthesis {
        Some(x) => {
            let _ = writeln!(s, "synthesis.technique = {}", x.chosen_technique);
            let _ = writeln!(s, "synthesis.train_rows = {}", x.train_rows);
            let _ = writeln!(s, "synthesis.synthetic_rows = {}", x.synthetic_rows);
            let _ = writeln!(s, "synthesis.validation_rows = {}", x.validation_rows);
            let _ = writeln!(s, "synthesis.merged_rows = {}", x.merged_rows);
            let _ = writeln!(s, "synthesis.misclassified_rows = {}", x.misclassified_rows);
        }
        None => s.push_str("synthesis = off\n"),
    }
    match &result.filtering {
        Some(x) => {
            let _ = writeln!(s, "filtering.threshold = {}", x.chosen_threshold);
            for (label, n) in &x.retained_counts {
                let _ = writeln!(s, "filtering.retained.class {label} = {n}");
            }
            let _ = writeln!(s, "filtering.discarded = {}", x.discarded);
        }
        None => s.push_str("filtering = off\n"),
    }
    match &result.selflearning {
        Some(x) => {
            let _ = writeln!(s, "selflearning.strategy = {}", x.strategy.as_str());
            let _ = writeln!(s, "selflearning.pool_rows = {}", x.pool_rows);
            let _ = writeln!(s, "selflearning.pseudo_labeled = {}", x.pseudo_count);
            let _ = writeln!(s, "selflearning.selection_rows = {}", x.selection_rows);
            let _ = writeln!(s, "selflearning.kfulf_holdout_f1 = {}", opt(x.kfulf_f1));
            let _ = writeln!(s, "selflearning.dds_holdout_f1 = {}", opt(x.dds_f1));
            let _ = writeln!(s, "selflearning.hidden_rows = {}", x.hidden_rows);
            let _ = writeln!(s, "selflearning.pseudo_accuracy = {}", opt(x.pseudo_accuracy));
            let _ = writeln!(s, "selflearning.base_accuracy = {}", opt(x.base_accuracy));
        }
        None => s.push_str("selflearning = off\n"),
    }
    for note in &result.notes {
        let _ = writeln!(s, "note = {note}");
    }
    for summary in &result.summaries {
        s.push('\n');
        s.push_str(&summary.to_text());
    }
    s
}

fn synthesis_csv(result: &EnhancementResult) -> String {
    let mut s = String::from("technique,f1,chosen\n");
    if let Some(x) = &result.synthesis {
        for t in &x.scores {
            let _ = writeln!(s, "{},{},{}", t.name, t.f1, t.name == x.chosen_technique);
        }
    }
    s
}

fn thresholds_csv(result: &EnhancementResult) -> String {
    let mut s = String::from("threshold,f1,kept_count,filtered_out_count,retained_count\n");
    if let Some(x) = &result.filtering {
        for t in &x.table {
            let f1 = if t.skipped() { String::new() } else { t.f1.to_string() };
            let _ = writeln!(s, "{},{},{},{},{}", t.threshold, f1, t.kept, t.filtered_out, t.retained);
        }
    }
    s
}

fn selflearn_csv(result: &EnhancementResult) -> String {
    match result.selflearning.as_ref().map(|x| &x.log) {
        Some(IterationLog::Kfulf(folds)) => {
            let mut s = String::from("fold,test_rows,artificial_rows,kept\n");
            for f in folds {
                let _ = writeln!(s, "{},{},{},{}", f.fold, f.test_rows.len(), f.artificial_rows, f.kept);
            }
            s
        }
        Some(IterationLog::Dds(iters)) => {
            let mut s = String::from("iteration,pool_size,selected,f1_base,f1_new,accepted,holdout_f1\n");
            for i in iters {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    i.iteration,
                    i.pool_size,
                    i.selected,
                    i.f1_base,
                    i.f1_new,
                    i.accepted,
                    opt(i.holdout_f1)
                );
            }
            s
        }
        None => String::new(),
    }
}

/// One `arm` row per report, columns as in [`REPORT_COLUMNS`].
pub fn metrics_csv(rows: &[(&str, &EvalReport)]) -> String {
    let mut s = format!("arm,{}\n", EvalReport::csv_header());
    for (arm, r) in rows {
        let _ = writeln!(s, "{arm},{}", r.to_csv_row());
    }
    s
}

/// Writes the full report of an `enhance` run into `dir`.
pub fn emit_report(
    dir: &Path,
    result: &EnhancementResult,
    settings: &Settings,
    plan: Option<&PreprocessPlan>,
    metrics: &[(&str, &EvalReport)],
) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write_dataset(&dir.join(ENHANCED_CSV), &result.enhanced, &settings.pipeline.label_column, true)?;
    write_text(&dir.join(SUMMARY_TXT), &summary_text(result, plan))?;
    write_text(&dir.join(SYNTHESIS_CSV), &synthesis_csv(result))?;
    write_text(&dir.join(THRESHOLDS_CSV), &thresholds_csv(result))?;
    write_text(&dir.join(SELFLEARN_CSV), &selflearn_csv(result))?;
    if !metrics.is_empty() {
        write_text(&dir.join(METRICS_CSV), &metrics_csv(metrics))?;
    }
    write_text(&dir.join(CONFIG_TXT), &settings.to_text())?;
    Ok(())
}

fn summary_rows(s: &mut String, arm: &str, m: &MetricSummary) {
    for (i, name) in REPORT_COLUMNS.iter().enumerate() {
        let _ = writeln!(s, "{arm},{name},{},{}", m.mean[i], m.std[i]);
    }
}

pub fn benchmark_folds_csv(report: &BenchmarkReport) -> String {
    let mut s = format!("fold,arm,train_rows,test_rows,{}\n", EvalReport::csv_header());
    for f in &report.folds {
        let _ = writeln!(s, "{},baseline,{},{},{}", f.fold, f.train_rows, f.test_rows, f.baseline.to_csv_row());
        let _ = writeln!(s, "{},enhanced,{},{},{}", f.fold, f.enhanced_rows, f.test_rows, f.enhanced.to_csv_row());
    }
    s
}

pub fn benchmark_summary_csv(report: &BenchmarkReport) -> String {
    let mut s = String::from("arm,metric,mean,std\n");
    summary_rows(&mut s, "baseline", &report.baseline);
    summary_rows(&mut s, "enhanced", &report.enhanced);
    s
}

pub fn emit_benchmark(dir: &Path, report: &BenchmarkReport, settings: &Settings) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write_text(&dir.join("benchmark_folds.csv"), &benchmark_folds_csv(report))?;
    write_text(&dir.join("benchmark_summary.csv"), &benchmark_summary_csv(report))?;
    write_text(&dir.join(CONFIG_TXT), &settings.to_text())?;
    Ok(())
}

/// Side-by-side `mean ± std` table for the terminal.
pub fn benchmark_table(report: &BenchmarkReport) -> String {
    let mut s = format!("{:<10} {:>20} {:>20}\n", "metric", "baseline", "enhanced");
    for (i, name) in REPORT_COLUMNS.iter().enumerate() {
        let cell = |m: &MetricSummary| format!("{:.4} ± {:.4}", m.mean[i], m.std[i]);
        let _ = writeln!(s, "{:<10} {:>20} {:>20}", name, cell(&report.baseline), cell(&report.enhanced));
    }
    s
}

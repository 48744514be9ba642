//! The subcommands, independent of argument parsing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use trienhance_core::generate::{generate_synthetic_benchmark, BenchmarkSpec};
use trienhance_core::pipeline::{benchmark_with, run_pipeline_with, BenchmarkReport, Clock, EnhancementResult};
use trienhance_core::selflearn::StrategyChoice;
use trienhance_core::{evaluate, Dataset, EvalReport, Learner, PreprocessOptions, PreprocessPlan};

use crate::config::Settings;
use crate::csv_io::{read_raw, write_dataset};
use crate::model_io::save_model;
use crate::report::{emit_benchmark, emit_report};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub label_column: Option<String>,
    pub positive_label: Option<String>,
    pub hide_labels: Option<f64>,
    pub disable_synthesis: bool,
    pub disable_filtering: bool,
    pub disable_selflearning: bool,
    pub strategy: Option<StrategyChoice>,
}

pub fn resolve_settings(config: Option<&Path>, o: &Overrides) -> Result<Settings> {
    let mut s = match config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let mut lines = Vec::new();
    if let Some(seed) = o.seed {
        lines.push(format!("seed = {seed}"));
    }
    if let Some(c) = &o.label_column {
        lines.push(format!("label_column = {c}"));
    }
    if let Some(p) = &o.positive_label {
        lines.push(format!("positive_label = {p}"));
    }
    if let Some(h) = o.hide_labels {
        lines.push(format!("hide_labels = {h}"));
    }
    for (on, key) in [
        (o.disable_synthesis, "disable_synthesis"),
        (o.disable_filtering, "disable_filtering"),
        (o.disable_selflearning, "disable_selflearning"),
    ] {
        if on {
            lines.push(format!("{key} = true"));
        }
    }
    if let Some(st) = o.strategy {
        lines.push(format!("strategy = {}", st.as_str()));
    }
    s.apply_text(&lines.join("\n"))?;
    Ok(s)
}

/// Encoded datasets sharing one preprocessing plan.
pub struct Prepared {
    pub plan: PreprocessPlan,
    pub input: Dataset,
    pub unlabeled: Option<Dataset>,
    pub test: Option<Dataset>,
}

/// Reads and encodes the input files. The plan is fitted on the input and
/// unlabeled files together; the test file is only encoded with it.
pub fn prepare(input: &Path, unlabeled: Option<&Path>, test: Option<&Path>, settings: &Settings) -> Result<Prepared> {
    let label = &settings.pipeline.label_column;
    let raw_input = read_raw(input, label, true)?;
    let raw_unlabeled = unlabeled.map(|p| read_raw(p, label, false)).transpose()?;
    let raw_test = test.map(|p| read_raw(p, label, true)).transpose()?;
    let opts = PreprocessOptions {
        missing_drop_threshold: settings.missing_drop_threshold,
        positive_label: settings.positive_label.clone(),
    };
    let mut tables = vec![&raw_input];
    let unlabeled_only = raw_unlabeled.as_ref().map(|u| trienhance_core::RawDataset { labels: None, ..u.clone() });
    tables.extend(unlabeled_only.as_ref());
    let plan = PreprocessPlan::fit(&tables, &opts).context("preprocessing")?;
    let input = plan.apply(&raw_input).with_context(|| format!("preprocessing {}", input.display()))?;
    let unlabeled = match &unlabeled_only {
        Some(u) => Some(plan.apply(u).context("preprocessing the unlabeled file")?.without_origin()),
        None => None,
    };
    let test = raw_test.as_ref().map(|t| plan.apply(t)).transpose().context("preprocessing the test file")?;
    Ok(Prepared { plan, input, unlabeled, test })
}

struct WallClock(Instant);

impl Clock for WallClock {
    fn now_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1000.0
    }
}

pub struct EnhanceArgs {
    pub input: PathBuf,
    pub unlabeled: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub out: PathBuf,
    pub save_model: Option<PathBuf>,
    pub settings: Settings,
}

pub struct EnhanceRun {
    pub result: EnhancementResult,
    pub plan: PreprocessPlan,
    /// Baseline and enhanced scores on the test file, when one was given.
    pub metrics: Option<(EvalReport, EvalReport)>,
}

/// Runs the pipeline and writes the report directory.
pub fn enhance(args: &EnhanceArgs) -> Result<EnhanceRun> {
    let prepared = prepare(&args.input, args.unlabeled.as_deref(), args.test.as_deref(), &args.settings)?;
    let cfg = &args.settings.pipeline;
    let clock = WallClock(Instant::now());
    let result = run_pipeline_with(&prepared.input, prepared.unlabeled.as_ref(), cfg, &cfg.classifier, &clock)?;

    let needs_model = args.save_model.is_some() || prepared.test.is_some();
    let model = needs_model.then(|| cfg.classifier.fit(&result.enhanced)).transpose()?;
    let metrics = match (&prepared.test, &model) {
        (Some(test), Some(m)) => {
            let base = cfg.classifier.fit(&prepared.input)?;
            Some((evaluate(&base, test, 0.5)?, evaluate(m, test, 0.5)?))
        }
        _ => None,
    };
    let rows: Vec<(&str, &EvalReport)> = match &metrics {
        Some((b, e)) => vec![("baseline", b), ("enhanced", e)],
        None => Vec::new(),
    };
    emit_report(&args.out, &result, &args.settings, Some(&prepared.plan), &rows)?;
    if let (Some(path), Some(m)) = (&args.save_model, &model) {
        save_model(path, m)?;
    }
    Ok(EnhanceRun { result, plan: prepared.plan, metrics })
}

pub fn benchmark(input: &Path, settings: &Settings, out: Option<&Path>) -> Result<BenchmarkReport> {
    let prepared = prepare(input, None, None, settings)?;
    let cfg = &settings.pipeline;
    let report = benchmark_with(&prepared.input, cfg, &cfg.classifier)?;
    if let Some(dir) = out {
        emit_benchmark(dir, &report, settings)?;
    }
    Ok(report)
}

pub fn generate(spec: &BenchmarkSpec, out: &Path, label_column: &str) -> Result<Dataset> {
    let d = generate_synthetic_benchmark(spec)?;
    write_dataset(out, &d, label_column, false)?;
    Ok(d)
}

/// Scores a CSV holding a 0/1 label column and a `p(y = 1)` score column.
pub fn score_file(path: &Path, label_column: &str, score_column: &str, threshold: f64) -> Result<EvalReport> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name).with_context(|| format!("no column `{name}`"));
    let (li, si) = (find(label_column)?, find(score_column)?);
    let mut labels = Vec::new();
    let mut scores = Vec::new();
    for (n, rec) in reader.records().enumerate() {
        let rec = rec?;
        let label: i32 = rec[li].parse().with_context(|| format!("row {}: bad label `{}`", n + 1, &rec[li]))?;
        if label != 0 && label != 1 {
            bail!("row {}: label must be 0 or 1, got {label}", n + 1);
        }
        labels.push(label);
        scores.push(rec[si].parse::<f64>().with_context(|| format!("row {}: bad score `{}`", n + 1, &rec[si]))?);
    }
    Ok(EvalReport::from_scores(&labels, &scores, threshold)?)
}

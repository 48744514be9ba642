//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are
//! errors. Lists are comma separated. [`Settings::to_text`] writes every key,
//! so a written file reproduces the run it came from.

use std::fmt::Write;
use std::path::Path;

use trienhance_core::classifier::{ClassifierKind, MaxFeatures};
use trienhance_core::pipeline::{PipelineConfig, TechniqueSpec};
use trienhance_core::selflearn::StrategyChoice;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`")]
    BadValue { line: usize, key: String, value: String },
    #[error("{0}")]
    Invalid(#[from] trienhance_core::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Everything a run needs besides its input files.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub pipeline: PipelineConfig,
    /// Label value mapped to class 1; the minority value when unset.
    pub positive_label: Option<String>,
    pub missing_drop_threshold: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self { pipeline: PipelineConfig::default(), positive_label: None, missing_drop_threshold: 0.5 }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

fn technique_name(t: &TechniqueSpec) -> Option<&'static str> {
    match t {
        TechniqueSpec::Smote { .. } => Some("smote"),
        TechniqueSpec::RandomOversample { .. } => Some("random-oversample"),
        TechniqueSpec::Replay { .. } => None,
    }
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        s.apply_text(text)?;
        Ok(s)
    }

    /// Applies the assignments in `text` on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        // technique parameters may come before or after the list
        let mut names: Option<Vec<String>> = None;
        let (mut smote_k, mut ratio) = self.technique_params();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = t.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || ConfigError::BadValue { line, key: key.into(), value: value.into() };
            let num = || value.parse::<f64>().map_err(|_| bad());
            let int = || value.parse::<usize>().map_err(|_| bad());
            let flag = || parse_bool(value).ok_or_else(bad);
            let p = &mut self.pipeline;
            match key {
                "seed" => {
                    let seed = value.parse::<u64>().map_err(|_| bad())?;
                    p.seed = seed;
                    p.classifier.seed = seed;
                }
                "classifier_seed" => p.classifier.seed = value.parse().map_err(|_| bad())?,
                "label_column" => p.label_column = value.into(),
                "positive_label" => self.positive_label = (!value.is_empty()).then(|| value.into()),
                "missing_drop_threshold" => self.missing_drop_threshold = num()?,
                "classifier" => p.classifier.kind = ClassifierKind::parse(value).ok_or_else(bad)?,
                "max_depth" => p.classifier.max_depth = int()?,
                "n_estimators" => p.classifier.n_estimators = int()?,
                "bootstrap" => p.classifier.bootstrap = flag()?,
                "max_features" => {
                    p.classifier.max_features = match value {
                        "sqrt" => MaxFeatures::Sqrt,
                        "all" => MaxFeatures::All,
                        _ => return Err(bad()),
                    }
                }
                "leaf_smoothing" => p.classifier.leaf_smoothing = num()?,
                "learning_rate" => p.classifier.learning_rate = num()?,
                "n_iterations" => p.classifier.n_iterations = int()?,
                "techniques" => {
                    let list: Vec<String> = value.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
                    if list.iter().any(|x| x != "smote" && x != "random-oversample") {
                        return Err(bad());
                    }
                    names = Some(list);
                }
                "smote_k" => smote_k = int()?,
                "target_ratio" => ratio = num()?,
                "synthesis_train_ratio" => p.synthesis_train_ratio = num()?,
                "thresholds" => {
                    p.thresholds = value
                        .split(',')
                        .map(|x| x.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad())?
                }
                "retention" => p.retention = flag()?,
                "k_folds" => p.pseudo.k_folds = int()?,
                "target_percentage" => p.pseudo.target_percentage = num()?,
                "max_iterations" => p.pseudo.max_iterations = int()?,
                "selection_holdout" => p.selection_holdout = num()?,
                "disable_synthesis" => p.disable_synthesis = flag()?,
                "disable_filtering" => p.disable_filtering = flag()?,
                "disable_selflearning" => p.disable_selflearning = flag()?,
                "strategy" => p.strategy = StrategyChoice::parse(value).ok_or_else(bad)?,
                "benchmark_folds" => p.benchmark_folds = int()?,
                "hide_labels" => p.hide_labels = num()?,
                _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
            }
        }
        let names = names.unwrap_or_else(|| {
            self.pipeline.techniques.iter().filter_map(technique_name).map(str::to_string).collect()
        });
        let replays = self.pipeline.techniques.iter().filter(|t| technique_name(t).is_none()).cloned();
        let mut techniques: Vec<TechniqueSpec> = names
            .iter()
            .map(|n| match n.as_str() {
                "smote" => TechniqueSpec::Smote { k_neighbors: smote_k, target_ratio: ratio },
                _ => TechniqueSpec::RandomOversample { target_ratio: ratio },
            })
            .collect();
        techniques.extend(replays);
        self.pipeline.techniques = techniques;
        self.pipeline.validate()?;
        Ok(())
    }

    fn technique_params(&self) -> (usize, f64) {
        let mut k = 5;
        let mut ratio = 1.0;
        for t in &self.pipeline.techniques {
            match t {
                TechniqueSpec::Smote { k_neighbors, target_ratio } => {
                    k = *k_neighbors;
                    ratio = *target_ratio;
                }
                TechniqueSpec::RandomOversample { target_ratio } => ratio = *target_ratio,
                TechniqueSpec::Replay { .. } => {}
            }
        }
        (k, ratio)
    }

    pub fn to_text(&self) -> String {
        let p = &self.pipeline;
        let c = &p.classifier;
        let (smote_k, ratio) = self.technique_params();
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        let techniques: Vec<&str> = p.techniques.iter().filter_map(technique_name).collect();
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("seed", p.seed.to_string());
        kv("classifier_seed", c.seed.to_string());
        kv("label_column", p.label_column.clone());
        kv("positive_label", self.positive_label.clone().unwrap_or_default());
        kv("missing_drop_threshold", self.missing_drop_threshold.to_string());
        kv("classifier", c.kind.as_str().into());
        kv("max_depth", c.max_depth.to_string());
        kv("n_estimators", c.n_estimators.to_string());
        kv("bootstrap", c.bootstrap.to_string());
        kv("max_features", match c.max_features {
            MaxFeatures::Sqrt => "sqrt".into(),
            MaxFeatures::All => "all".into(),
        });
        kv("leaf_smoothing", c.leaf_smoothing.to_string());
        kv("learning_rate", c.learning_rate.to_string());
        kv("n_iterations", c.n_iterations.to_string());
        kv("techniques", techniques.join(", "));
        kv("smote_k", smote_k.to_string());
        kv("target_ratio", ratio.to_string());
        kv("synthesis_train_ratio", p.synthesis_train_ratio.to_string());
        kv("thresholds", list(&p.thresholds));
        kv("retention", p.retention.to_string());
        kv("k_folds", p.pseudo.k_folds.to_string());
        kv("target_percentage", p.pseudo.target_percentage.to_string());
        kv("max_iterations", p.pseudo.max_iterations.to_string());
        kv("selection_holdout", p.selection_holdout.to_string());
        kv("disable_synthesis", p.disable_synthesis.to_string());
        kv("disable_filtering", p.disable_filtering.to_string());
        kv("disable_selflearning", p.disable_selflearning.to_string());
        kv("strategy", p.strategy.as_str().into());
        kv("benchmark_folds", p.benchmark_folds.to_string());
        kv("hide_labels", p.hide_labels.to_string());
        s
    }
}

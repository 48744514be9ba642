//! The three blocks chained together, plus the cross-validation benchmark.
//!
//! Stage order is fixed: synthesis, filtering, self-learning. A disabled
//! stage passes its input through unchanged, so with every stage disabled the
//! output equals the input.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::classifier::{predict, ClassifierSpec, Learner};
use crate::dataset::{class_stats, Dataset, Provenance};
use crate::error::{Error, Result};
use crate::filtering::{default_thresholds, filter_sweep, ThresholdScore};
use crate::metrics::{evaluate, EvalReport, MetricSummary};
use crate::selflearn::{dds, kfulf, select_strategy, IterationLog, PseudoLabelConfig, Strategy, StrategyChoice};
use crate::split::{holdout, stratified_split, SplitSpec};
use crate::summary::StageSummary;
use crate::synthesis::{meta_synthesize, RandomOversampler, Replay, Smote, SynthesisTechnique, TechniqueScore};

#[derive(Debug, Clone, PartialEq)]
pub enum TechniqueSpec {
    RandomOversample { target_ratio: f64 },
    Smote { k_neighbors: usize, target_ratio: f64 },
    /// Externally generated rows offered as a technique.
    Replay { name: String, rows: Dataset },
}

impl TechniqueSpec {
    pub fn name(&self) -> String {
        self.build().name()
    }

    pub fn build(&self) -> Box<dyn SynthesisTechnique> {
        match self {
            TechniqueSpec::RandomOversample { target_ratio } => Box::new(RandomOversampler { target_ratio: *target_ratio }),
            TechniqueSpec::Smote { k_neighbors, target_ratio } => {
                Box::new(Smote { k_neighbors: *k_neighbors, target_ratio: *target_ratio })
            }
            TechniqueSpec::Replay { name, rows } => Box::new(Replay { name: name.clone(), rows: rows.clone() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub classifier: ClassifierSpec,
    pub techniques: Vec<TechniqueSpec>,
    /// Share of the input used as sub-training set in the synthesis race.
    pub synthesis_train_ratio: f64,
    pub thresholds: Vec<f64>,
    pub retention: bool,
    /// Its `seed` field is ignored; the pipeline seed is used instead.
    pub pseudo: PseudoLabelConfig,
    /// Share of the filtered set held out to choose the self-learning strategy.
    pub selection_holdout: f64,
    pub disable_synthesis: bool,
    pub disable_filtering: bool,
    pub disable_selflearning: bool,
    pub strategy: StrategyChoice,
    pub benchmark_folds: usize,
    pub label_column: String,
    /// Share of the labeled input whose labels are hidden to form an
    /// unlabeled pool. Only used when self-learning is enabled.
    pub hide_labels: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: crate::DEFAULT_SEED,
            classifier: ClassifierSpec::default(),
            techniques: alloc::vec![
                TechniqueSpec::Smote { k_neighbors: 5, target_ratio: 1.0 },
                TechniqueSpec::RandomOversample { target_ratio: 1.0 },
            ],
            synthesis_train_ratio: 0.8,
            thresholds: default_thresholds(),
            retention: true,
            pseudo: PseudoLabelConfig::default(),
            selection_holdout: 0.2,
            disable_synthesis: false,
            disable_filtering: false,
            disable_selflearning: false,
            strategy: StrategyChoice::Auto,
            benchmark_folds: 3,
            label_column: "label".into(),
            hide_labels: 0.0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.classifier.validate()?;
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.synthesis_train_ratio) {
            return Err(Error::InvalidParameter(format!("synthesis_train_ratio {} not in (0, 1)", self.synthesis_train_ratio)));
        }
        if !open_unit(self.selection_holdout) {
            return Err(Error::InvalidParameter(format!("selection_holdout {} not in (0, 1)", self.selection_holdout)));
        }
        if !(0.0..1.0).contains(&self.hide_labels) {
            return Err(Error::InvalidParameter(format!("hide_labels {} not in [0, 1)", self.hide_labels)));
        }
        if self.benchmark_folds < 2 {
            return Err(Error::InvalidParameter("benchmark_folds must be at least 2".into()));
        }
        Ok(())
    }
}

/// Source of wall-clock milliseconds for stage timing.
pub trait Clock {
    fn now_ms(&self) -> f64;
}

/// Reports zero for every reading.
pub struct NullClock;

impl Clock for NullClock {
    fn now_ms(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSummary {
    pub chosen_technique: String,
    pub scores: Vec<TechniqueScore>,
    pub train_rows: usize,
    pub synthetic_rows: usize,
    pub validation_rows: usize,
    pub merged_rows: usize,
    pub misclassified_rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSummary {
    pub chosen_threshold: f64,
    pub table: Vec<ThresholdScore>,
    pub retained_counts: Vec<(i32, usize)>,
    pub discarded: usize,
    pub misclassified_rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfLearnSummary {
    pub strategy: Strategy,
    pub pseudo_count: usize,
    pub pool_rows: usize,
    pub log: IterationLog,
    pub kfulf_f1: Option<f64>,
    pub dds_f1: Option<f64>,
    pub selection_rows: usize,
    /// Rows whose labels were hidden from the input.
    pub hidden_rows: usize,
    /// Accuracy of the pseudo-labels given to hidden rows, against their
    /// true labels.
    pub pseudo_accuracy: Option<f64>,
    /// Accuracy on the hidden rows of a model trained on the self-learning
    /// training set alone.
    pub base_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageTiming {
    pub stage: &'static str,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnhancementResult {
    /// Final output.
    pub enhanced: Dataset,
    /// The labeled rows the pipeline worked on (the input minus hidden rows).
    pub labeled: Dataset,
    pub augmented: Dataset,
    pub filtered: Dataset,
    pub synthesis: Option<SynthesisSummary>,
    pub filtering: Option<FilterSummary>,
    pub selflearning: Option<SelfLearnSummary>,
    pub summaries: Vec<StageSummary>,
    pub timings: Vec<StageTiming>,
    pub notes: Vec<String>,
}

/// [`run_pipeline_with`] using the configured classifier and no timing.
pub fn run_pipeline(input: &Dataset, unlabeled: Option<&Dataset>, cfg: &PipelineConfig) -> Result<EnhancementResult> {
    run_pipeline_with(input, unlabeled, cfg, &cfg.classifier, &NullClock)
}

fn fraction_correct(truth: &[i32], predicted: &[i32]) -> Option<f64> {
    if truth.is_empty() {
        return None;
    }
    let ok = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    Some(ok as f64 / truth.len() as f64)
}

pub fn run_pipeline_with<L: Learner, C: Clock + ?Sized>(
    input: &Dataset,
    unlabeled: Option<&Dataset>,
    cfg: &PipelineConfig,
    learner: &L,
    clock: &C,
) -> Result<EnhancementResult> {
    cfg.validate()?;
    input.require_binary()?;
    if let Some(u) = unlabeled {
        if u.n_features() != input.n_features() {
            return Err(Error::DimensionMismatch { expected: input.n_features(), got: u.n_features() });
        }
    }
    let mut notes = Vec::new();
    let mut timings = Vec::new();
    let mut summaries = alloc::vec![StageSummary::of("input", input)];

    // hidden rows only matter to self-learning; skipping the carve otherwise
    // keeps fully disabled runs an exact identity
    let (labeled, hidden) = if !cfg.disable_selflearning && cfg.hide_labels > 0.0 {
        let (l, h) = holdout(input, 1.0 - cfg.hide_labels, cfg.seed).map_err(|e| e.in_stage("hide-labels"))?;
        summaries.push(StageSummary::of("labeled", &l));
        (l, Some(h))
    } else {
        (input.clone(), None)
    };
    let priors = class_stats(&labeled)?;

    let t0 = clock.now_ms();
    let (augmented, synth_model, misclassified, synthesis) = if cfg.disable_synthesis {
        (labeled.clone(), None, None, None)
    } else {
        let techs: Vec<Box<dyn SynthesisTechnique>> = cfg.techniques.iter().map(|t| t.build()).collect();
        let refs: Vec<&dyn SynthesisTechnique> = techs.iter().map(|t| t.as_ref()).collect();
        let out = meta_synthesize(&labeled, &refs, learner, &SplitSpec::holdout(cfg.synthesis_train_ratio, cfg.seed), cfg.seed)
            .map_err(|e| e.in_stage("synthesis"))?;
        let summary = SynthesisSummary {
            chosen_technique: out.chosen_technique.clone(),
            scores: out.scores.clone(),
            train_rows: out.train_rows,
            synthetic_rows: out.synthetic_rows,
            validation_rows: out.validation_rows,
            merged_rows: out.merged_rows,
            misclassified_rows: out.misclassified.n_rows(),
        };
        (out.augmented, Some(out.model), Some(out.misclassified), Some(summary))
    };
    timings.push(StageTiming { stage: "synthesis", millis: clock.now_ms() - t0 });
    summaries.push(StageSummary::of("augmented", &augmented));

    let t0 = clock.now_ms();
    let (filtered, filtering) = if cfg.disable_filtering {
        (augmented.clone(), None)
    } else {
        let (model, mis) = match (synth_model, misclassified) {
            (Some(m), Some(mis)) => (m, mis),
            _ => {
                // without synthesis the hard rows are the training rows the
                // input model gets wrong
                let m = learner.fit(&labeled).map_err(|e| e.in_stage("filtering"))?;
                let pred = predict(&m, &labeled, 0.5)?;
                let truth = labeled.require_labels()?;
                let wrong: Vec<usize> = (0..labeled.n_rows()).filter(|&i| pred[i] != truth[i]).collect();
                (m, labeled.subset(&wrong))
            }
        };
        if mis.is_empty() {
            notes.push("filtering skipped: no misclassified rows to score thresholds on".into());
            (augmented.clone(), None)
        } else {
            let out = filter_sweep(&augmented, &mis, &model, learner, &cfg.thresholds, &priors, cfg.retention)
                .map_err(|e| e.in_stage("filtering"))?;
            let summary = FilterSummary {
                chosen_threshold: out.chosen_threshold,
                table: out.table.clone(),
                retained_counts: out.retained_counts.clone(),
                discarded: out.discarded,
                misclassified_rows: mis.n_rows(),
            };
            (out.filtered, Some(summary))
        }
    };
    timings.push(StageTiming { stage: "filtering", millis: clock.now_ms() - t0 });
    summaries.push(StageSummary::of("filtered", &filtered));

    let t0 = clock.now_ms();
    let mut pool_parts = Vec::new();
    let mut truth: Vec<i32> = Vec::new();
    if let Some(h) = &hidden {
        truth = h.require_labels()?.to_vec();
        pool_parts.push(h.clone().without_labels());
    }
    if let Some(u) = unlabeled {
        pool_parts.push(u.clone().without_labels());
    }
    let pool = match pool_parts.split_first() {
        Some((first, rest)) => rest.iter().try_fold(first.clone(), |acc, p| acc.concat(p))?,
        None => filtered.empty_like().without_labels(),
    };

    let (enhanced, selflearning) = if cfg.disable_selflearning {
        (filtered.clone(), None)
    } else if pool.is_empty() {
        notes.push("self-learning skipped: no unlabeled rows".into());
        (filtered.clone(), None)
    } else {
        let pcfg = PseudoLabelConfig { seed: cfg.seed, ..cfg.pseudo.clone() };
        let (train, selection) = match cfg.strategy {
            StrategyChoice::Auto => {
                let (t, s) = holdout(&filtered, 1.0 - cfg.selection_holdout, cfg.seed).map_err(|e| e.in_stage("self-learning"))?;
                (t, Some(s))
            }
            StrategyChoice::Only(_) => (filtered.clone(), None),
        };
        let (outcome, kfulf_f1, dds_f1) = match (cfg.strategy, &selection) {
            (StrategyChoice::Only(Strategy::Kfulf), _) => (kfulf(&train, &pool, learner, &pcfg), None, None),
            (StrategyChoice::Only(Strategy::Dds), _) => (dds(&train, &pool, learner, &pcfg, None), None, None),
            (StrategyChoice::Auto, Some(sel)) => match select_strategy(&train, &pool, sel, learner, &pcfg, StrategyChoice::Auto) {
                Ok(s) => (Ok(s.outcome), s.kfulf_f1, s.dds_f1),
                Err(e) => (Err(e), None, None),
            },
            (StrategyChoice::Auto, None) => unreachable!("auto strategy always carves a selection holdout"),
        };
        let outcome = outcome.map_err(|e| e.in_stage("self-learning"))?;

        let n_hidden = truth.len();
        let (mut t_hidden, mut p_hidden) = (Vec::new(), Vec::new());
        for p in outcome.pseudo.iter().filter(|p| p.pool_index < n_hidden) {
            t_hidden.push(truth[p.pool_index]);
            p_hidden.push(p.label);
        }
        let base_accuracy = match &hidden {
            Some(h) => {
                let m = learner.fit(&train).map_err(|e| e.in_stage("self-learning"))?;
                fraction_correct(&truth, &predict(&m, h, 0.5)?)
            }
            None => None,
        };
        let enhanced = match &selection {
            Some(sel) => outcome.enhanced.concat(sel)?,
            None => outcome.enhanced.clone(),
        };
        let summary = SelfLearnSummary {
            strategy: outcome.strategy,
            pseudo_count: outcome.pseudo_count(),
            pool_rows: pool.n_rows(),
            log: outcome.log,
            kfulf_f1,
            dds_f1,
            selection_rows: selection.as_ref().map_or(0, |s| s.n_rows()),
            hidden_rows: n_hidden,
            pseudo_accuracy: fraction_correct(&t_hidden, &p_hidden),
            base_accuracy,
        };
        (enhanced, Some(summary))
    };
    timings.push(StageTiming { stage: "self-learning", millis: clock.now_ms() - t0 });
    summaries.push(StageSummary::of("enhanced", &enhanced));

    Ok(EnhancementResult {
        enhanced,
        labeled,
        augmented,
        filtered,
        synthesis,
        filtering,
        selflearning,
        summaries,
        timings,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkFold {
    pub fold: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub enhanced_rows: usize,
    pub baseline: EvalReport,
    pub enhanced: EvalReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub folds: Vec<BenchmarkFold>,
    pub baseline: MetricSummary,
    pub enhanced: MetricSummary,
}

/// [`benchmark_with`] using the configured classifier.
pub fn benchmark(input: &Dataset, cfg: &PipelineConfig) -> Result<BenchmarkReport> {
    benchmark_with(input, cfg, &cfg.classifier)
}

/// Stratified k-fold comparison of a model trained on the raw training fold
/// against one trained on the enhanced training fold, both scored on the
/// untouched test fold. Fold `k` runs the pipeline with seed `seed + k`.
pub fn benchmark_with<L: Learner>(input: &Dataset, cfg: &PipelineConfig, learner: &L) -> Result<BenchmarkReport> {
    cfg.validate()?;
    input.require_binary()?;
    let input = input.clone().with_origin_indices();
    let parts = stratified_split(&input, &SplitSpec::k_fold(cfg.benchmark_folds, cfg.seed))?;
    let mut folds = Vec::with_capacity(parts.len());
    for (k, test_idx) in parts.iter().enumerate() {
        let mut in_test = alloc::vec![false; input.n_rows()];
        test_idx.iter().for_each(|&i| in_test[i] = true);
        let train_idx: Vec<usize> = (0..input.n_rows()).filter(|&i| !in_test[i]).collect();
        let train = input.subset(&train_idx);
        let test = input.subset(test_idx);

        let baseline = evaluate(&learner.fit(&train)?, &test, 0.5)?;
        let fold_cfg = PipelineConfig { seed: cfg.seed + k as u64, ..cfg.clone() };
        let result = run_pipeline_with(&train, None, &fold_cfg, learner, &NullClock)?;
        let enhanced_set = &result.enhanced;
        let leaked = test.provenance().iter().any(|&p| p != Provenance::Original)
            || enhanced_set.origin().iter().any(|o| o.is_some_and(|i| in_test[i]));
        if leaked {
            return Err(Error::Leakage(k));
        }
        let enhanced = evaluate(&learner.fit(enhanced_set)?, &test, 0.5)?;
        folds.push(BenchmarkFold {
            fold: k,
            train_rows: train.n_rows(),
            test_rows: test.n_rows(),
            enhanced_rows: enhanced_set.n_rows(),
            baseline,
            enhanced,
        });
    }
    let b: Vec<EvalReport> = folds.iter().map(|f| f.baseline).collect();
    let e: Vec<EvalReport> = folds.iter().map(|f| f.enhanced).collect();
    Ok(BenchmarkReport { baseline: MetricSummary::of(&b), enhanced: MetricSummary::of(&e), folds })
}

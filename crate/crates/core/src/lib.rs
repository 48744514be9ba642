//! Enhancement of imbalanced binary-classification tabular data.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every algorithmic
//! piece of the toolkit: the [`Dataset`] model and preprocessing, stratified
//! splitting, self-hosted probabilistic classifiers, evaluation metrics and the
//! three enhancement blocks:
//!
//! 1. [`synthesis`]: minority-class generators raced against each other by
//!    validation F1,
//! 2. [`filtering`]: prediction-margin filtering with class-proportional
//!    retention of the filtered-out rows,
//! 3. [`selflearn`]: pseudo-label self-learning (k-fold unknown-label
//!    filtering and the delay-decision strategy).
//!
//! [`pipeline`] chains the blocks and runs the stratified cross-validation
//! benchmark. File formats, configuration files and the command line live in
//! the `trienhance` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classifier;
pub mod dataset;
pub mod error;
pub mod filtering;
pub mod generate;
pub mod metrics;
pub mod pipeline;
pub mod preprocess;
pub mod selflearn;
pub mod split;
pub mod summary;
pub mod synthesis;

mod util;

pub use classifier::{
    predict, predict_proba, ClassifierKind, ClassifierSpec, Learner, MaxFeatures, Model,
    Probabilities, TrainedModel,
};
pub use dataset::{class_stats, ClassStats, ColumnKind, Dataset, Label, Provenance};
pub use error::{Error, Result};
pub use metrics::{auc, confusion, evaluate, ks_statistic, ConfusionCounts, EvalReport};
pub use pipeline::{benchmark, run_pipeline, EnhancementResult, PipelineConfig};
pub use preprocess::{preprocess, PreprocessOptions, PreprocessPlan, RawDataset};
pub use split::{stratified_split, SplitSpec};

/// Seed used throughout when none is configured.
pub const DEFAULT_SEED: u64 = 42;

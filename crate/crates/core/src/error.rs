use alloc::boxed::Box;
use alloc::string::String;

use crate::dataset::Label;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("single-class training set")]
    SingleClass,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("dimensionality mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("dataset has no labels")]
    Unlabeled,
    #[error("label {0} is not binary (expected 0 or 1)")]
    NonBinaryLabel(Label),
    #[error("only one class present; both classes are required")]
    MissingClass,
    #[error("class {label} too small: {count} rows, need at least {needed}")]
    ClassTooSmall { label: Label, count: usize, needed: usize },
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("non-finite score at position {0}")]
    NonFiniteScore(usize),
    #[error("all columns dropped during preprocessing")]
    AllColumnsDropped,
    #[error("column `{column}`: {message}")]
    Column { column: String, message: String },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("empty minority class")]
    EmptyMinority,
    #[error("minority class has {0} rows; SMOTE needs at least 2")]
    TooFewMinority(usize),
    #[error("no synthesis techniques configured")]
    NoTechniques,
    #[error("every threshold produced an empty or single-class filtered dataset")]
    AllThresholdsSkipped,
    #[error("unlabeled pool has {pool} rows, fewer than k_folds = {k}")]
    PoolTooSmall { pool: usize, k: usize },
    #[error("model does not predict label {0}")]
    UnknownLabel(Label),
    #[error("fold {0}: a test row reached the enhanced training set")]
    Leakage(usize),
    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<Error> },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: missing value in column '{column}'")]
    MissingValue { row: usize, column: String },

    #[error("row {row}, column '{column}': cannot parse '{value}' as a number")]
    ParseNumber {
        row: usize,
        column: String,
        value: String,
    },

    #[error("duplicate feature name '{0}'")]
    DuplicateFeature(String),

    #[error("label column {index} out of range for {width} columns")]
    LabelColumnOutOfRange { index: usize, width: usize },

    #[error("unknown feature(s): {}", .0.join(", "))]
    UnknownFeatures(Vec<String>),

    #[error("feature '{feature}' cannot be {kind}: {reason}")]
    InvalidKind {
        feature: String,
        kind: String,
        reason: String,
    },

    #[error("label rule maps no training label to the positive class")]
    NoPositiveLabel,

    #[error("dataset columns do not match schema: {0}")]
    SchemaMismatch(String),

    #[error("empty feature subset")]
    EmptySubset,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("AUC undefined: y_true contains a single class")]
    AucUndefined,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("label column {0:?} not found in header")]
    LabelColumnMissing(String),

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column:?}: missing value")]
    MissingValue { row: usize, column: String },

    #[error("file has a header but no data rows")]
    EmptyBody,

    #[error("invalid binning spec: {0}")]
    InvalidBinning(String),

    #[error("feature index {index} out of range (dataset has {count} features)")]
    FeatureOutOfRange { index: usize, count: usize },

    #[error("feature {0} already present in subset")]
    DuplicateFeature(usize),

    #[error("table was built from raw counts and carries no row mapping; cannot extend")]
    DetachedTable,

    #[error("train fraction {fraction} leaves an empty {side} part for {n_rows} rows")]
    EmptySplit {
        fraction: f64,
        side: &'static str,
        n_rows: usize,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid Renyi order: {0}")]
    InvalidOrder(String),

    #[error("stop rule must set at least one of threshold, max-features, target-error")]
    EmptyStopRule,

    #[error("exhaustive search supports at most {limit} features, dataset has {found}")]
    TooManyFeatures { limit: usize, found: usize },

    #[error("threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),

    #[error("trace references feature {feature} absent from the dataset")]
    TraceMismatch { feature: usize },

    #[error("train and test datasets have different schemas: {0}")]
    SchemaMismatch(String),

    #[error("test set is empty")]
    EmptyTest,

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("feature index out of range: {index} (dataset has {n_features} features)")]
    FeatureIndexOutOfRange { index: usize, n_features: usize },

    #[error("divergence detected (reduce learning rate) at epoch {epoch}")]
    Divergence { epoch: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("undefined correlation for constant input")]
    ConstantInput,

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("series too short: need at least {min} values, got {len}")]
    SeriesTooShort { min: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("constant column `{0}` cannot be standardized")]
    ConstantColumn(String),

    #[error("cannot open {}: {source}", path.display())]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV at row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("non-numeric cell {value:?} at row {row}, column `{column}`")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("unknown target column `{0}`")]
    UnknownTargetColumn(String),

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("unexpected IDX magic 0x{found:08x} (expected 0x{expected:08x})")]
    IdxMagic { expected: u32, found: u32 },

    #[error("truncated IDX file {}: {what}", path.display())]
    IdxTruncated { path: PathBuf, what: String },

    #[error("IDX count mismatch: {images} images but {labels} labels")]
    IdxCountMismatch { images: usize, labels: usize },

    #[error("trace format error: {0}")]
    TraceFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Divergence is the only numerical failure; everything else stems from inputs.
    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::Divergence { .. })
    }
}

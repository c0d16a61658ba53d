use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("record has {got} fields, expected {expected}")]
    FieldCount { expected: usize, got: usize },

    #[error("attribute `{attribute}`: cannot parse `{text}` as a number")]
    BadNumber { attribute: String, text: String },

    #[error("unknown class label `{label}` and no fallback category configured")]
    UnknownLabel { label: String },

    #[error("row {row}: {source}")]
    AtRow {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("input contains no records")]
    EmptyDataset,

    #[error("entropy is undefined for an empty dataset")]
    UndefinedEntropy,

    #[error("attribute `{attribute}` is not discrete (discretize continuous attributes first)")]
    NotDiscrete { attribute: String },

    #[error("attribute `{attribute}` is not continuous")]
    NotContinuous { attribute: String },

    #[error("attribute `{attribute}` has no observed values to impute from")]
    Unimputable { attribute: String },

    #[error("attribute index {index} out of range for schema of arity {arity}")]
    AttributeIndex { index: usize, arity: usize },

    #[error("k = {k} out of range 1..={arity}")]
    SubsetSize { k: usize, arity: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("prediction and truth sequences differ in length ({preds} vs {truth})")]
    LengthMismatch { preds: usize, truth: usize },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("config file: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn at_row(self, row: usize) -> Error {
        Error::AtRow {
            row,
            source: Box::new(self),
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },

    #[error("distance matrix is empty")]
    EmptySpace,

    #[error("negative distance at ({i}, {j})")]
    NegativeEntry { i: usize, j: usize },

    #[error("metric axioms violated: {0}")]
    NotAMetric(String),

    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),

    #[error("{count} labels for a {size}x{size} distance matrix")]
    LabelCountMismatch { count: usize, size: usize },

    #[error("map is not total: no image for point {0:?}")]
    NonTotalMap(String),

    #[error("unknown point label {0:?} in {1}")]
    UnknownLabel(String, &'static str),

    #[error("point index {index} out of range for a {size}-point space")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("{what} requires {min} <= k <= {max}, got k = {k}")]
    InvalidK {
        what: &'static str,
        k: usize,
        min: usize,
        max: usize,
    },

    #[error("tuple of length {len} is too short for {what} (minimum {min})")]
    TupleTooShort {
        what: &'static str,
        len: usize,
        min: usize,
    },

    #[error("{0} requires at least two points")]
    TooFewPoints(&'static str),

    #[error("invalid instance file: {0}")]
    InstanceFormat(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("oracle produced a non-finite value at step {step}: {detail}")]
    NonFinite { step: usize, detail: String },

    #[error("unknown map {0:?}")]
    UnknownMap(String),

    #[error("unknown instance {0:?}")]
    UnknownInstance(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

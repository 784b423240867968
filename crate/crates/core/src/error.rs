use thiserror::Error;

use crate::ft::ChainWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    MalformedJson(#[from] serde_json::Error),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entry in {what} at ({row}, {col})")]
    NonFinite {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error("n must be positive")]
    EmptyInstance,

    #[error("assignment is not a permutation of 0..{n}")]
    NotAPermutation { n: usize },

    #[error("{what} = {value} is outside [0, 1]")]
    ParameterOutOfRange { what: &'static str, value: f64 },

    #[error("n = {n} exceeds the limit of {limit} for {operation}")]
    SizeLimit {
        operation: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("matching is not cyclically monotone (chain gain {})", .0.gain)]
    NotCyclicallyMonotone(ChainWitness),

    #[error("the taxed model needs a beta matrix")]
    MissingBeta,

    #[error("beta entry {value} at ({row}, {col}) is outside (0, 1]")]
    InvalidBeta { row: usize, col: usize, value: f64 },

    #[error("unknown bargaining model {0:?}")]
    UnknownModel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

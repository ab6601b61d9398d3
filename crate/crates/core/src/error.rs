use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index out of range: {name}={value} (size {size})")]
    IndexOutOfRange {
        name: &'static str,
        value: usize,
        size: usize,
    },

    #[error("invalid game field `{field}`: {reason}")]
    InvalidGame { field: String, reason: String },

    #[error("distribution not normalized (sum = {sum})")]
    DistributionNotNormalized { sum: f64 },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("predicate expression error at position {position}: {message}")]
    Dsl { position: usize, message: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("predicate is not boolean at (x={x}, y={y}, a={a}, b={b}): {value}")]
    NonBooleanPredicate {
        x: usize,
        y: usize,
        a: usize,
        b: usize,
        value: f64,
    },

    #[error("negative weight {weight} on vertex {vertex}")]
    NegativeWeight { vertex: usize, weight: f64 },

    #[error("not an XOR game: {0}")]
    NotXorGame(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid quantum independent set: {0}")]
    InvalidQis(String),

    #[error("strategy is not perfect: winning probability {value}")]
    NotPseudoTelepathy { value: f64 },

    #[error("projectors do not commute: |[P^{x}_{a}, Q^{y}_{b}]|_F = {norm}")]
    NonCommuting {
        x: usize,
        y: usize,
        a: usize,
        b: usize,
        norm: f64,
    },

    #[error("shared state is not maximally entangled")]
    NotMaximallyEntangled,

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("graph format error on line {line}: {message}")]
    GraphFormat { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidGame {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

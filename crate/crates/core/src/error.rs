use thiserror::Error;

/// Errors raised by the solvers, generators and checkers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty group")]
    EmptyGroup,
    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid database: {0}")]
    InvalidDatabase(String),
    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid 3DM instance: {0}")]
    InvalidMatchingInstance(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),

    #[error("empty input")]
    EmptyInput,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("outcome enumeration over {n} interfaces exceeds the limit of {limit}")]
    EnumerationTooLarge { n: usize, limit: usize },

    #[error("invalid k={k} for N={n} interfaces (need 1 <= k <= N)")]
    InvalidK { k: usize, n: usize },

    #[error("closed form needs identical interfaces")]
    NonIdenticalInterfaces,

    #[error("invalid interface profile: {0}")]
    InvalidProfile(String),

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid optimization target: {0}")]
    InvalidTarget(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no grid point satisfies the decoding constraint")]
    InfeasibleGrid,

    #[error("search space of {points} allocations exceeds the budget of {budget}")]
    SearchSpaceTooLarge { points: u128, budget: u128 },

    #[error("argument {0} outside the open interval (0, 1)")]
    DomainError(f64),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("traces share no probe index")]
    NoOverlap,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

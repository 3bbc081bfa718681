use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid measurement `{label}`: {reason}")]
    InvalidMeasurement { label: String, reason: String },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("functional `{name}` takes {expected} arguments, got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("functional `{0}` is already registered")]
    DuplicateFunctional(String),

    #[error("state set is empty")]
    EmptyStateSet,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("outcome grid has {size} cells, limit is {limit}")]
    GridTooLarge { size: usize, limit: usize },

    #[error("overlap c = {0} is outside the allowed range")]
    OverlapOutOfRange(f64),

    #[error("middle-band term h2 requested at c = {0} but no h2 source is configured")]
    MissingMiddleBand(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid correlation table: {0}")]
    InvalidTable(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("tomography input is not informationally complete (rank {rank} < {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("{path}:{line}: {reason}")]
    Fixture {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

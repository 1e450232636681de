use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dataset contains no sequences")]
    EmptyDataset,
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("slice [{start}, {end}) out of bounds for length {len}")]
    OutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("window length {window} exceeds sequence length {len}")]
    WindowTooLong { window: usize, len: usize },
    #[error("window length must be positive")]
    ZeroWindow,
    #[error("invalid sliding factor J={factor} for window length {window}")]
    InvalidSlidingFactor { factor: usize, window: usize },

    #[error("{frames} frames do not evenly divide length {len}")]
    FrameMismatch { len: usize, frames: usize },
    #[error("requested {requested} coefficients but at most {max} are available")]
    TooManyCoefficients { requested: usize, max: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("requested {requested} segments for length {len}")]
    TooManySegments { requested: usize, len: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid norm order p={0} (must be >= 1)")]
    InvalidP(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("infeasible warping constraint: {0}")]
    InfeasibleConstraint(String),

    #[error("reduced vectors come from different transforms or source lengths")]
    TransformMismatch,
    #[error("lower bound {lower} exceeds true distance {true_dist}")]
    BoundViolation { lower: f64, true_dist: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no sequence is long enough to index with window {window}")]
    NoIndexableSequence { window: usize },
    #[error("index file: {0}")]
    IndexFormat(String),

    #[error("query of length {query_len} does not fit in any sequence")]
    QueryTooLong { query_len: usize },
    #[error("query of length {query_len} is shorter than window {window}")]
    QueryShorterThanWindow { query_len: usize, window: usize },
    #[error("index configuration mismatch: {0}")]
    IndexConfigMismatch(String),
    #[error("window {window} too large for query length {query_len} (need window <= (len+1)/2)")]
    WindowTooLargeForQuery { window: usize, query_len: usize },
    #[error("requested {requested} neighbours but only {available} placements exist")]
    NotEnoughPlacements { requested: usize, available: usize },

    #[error("requested {requested} clusters but only {windows} windows exist")]
    TooManyClusters { requested: usize, windows: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

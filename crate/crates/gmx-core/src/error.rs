//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("index set mismatch: {0}")]
    LabelMismatch(String),
    #[error("codes have different lengths or index sets: {0}")]
    LengthMismatch(String),
    #[error("empty coordinate subset")]
    EmptySubset,
    #[error("unknown coordinate {0}")]
    UnknownCoordinate(String),
    #[error("unknown constraint {0}")]
    UnknownConstraint(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("extension parity-check matrix is inconsistent: {0}")]
    InconsistentExtension(String),
    #[error("operation not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("constraint cannot be split with the requested supports: {0}")]
    NotSplittable(String),
    #[error("not a degree-2 repetition constraint: {0}")]
    NotARepetition(String),
    #[error("constraint is not trivial: {0}")]
    NotTrivial(String),
    #[error("partial-parity constraint is not isolated: {0}")]
    NotIsolated(String),
    #[error("constraint is not internal: {0}")]
    NotInternal(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("input too large for exhaustive processing: {0}")]
    TooLarge(String),
    #[error("local code too large for exact processing: {0}")]
    TooLargeLocalCode(String),
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("graph has parallel edges")]
    Multigraph,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("model is not cycle-free")]
    NotCycleFree,
    #[error("parity-check matrix has an all-zero column {0}")]
    ZeroColumn(usize),
    #[error("hidden variable {0} is not determined by the visible variables")]
    Unobservable(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a configured limit rather than bad data.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded(_) | Error::TooLargeLocalCode(_) | Error::TooLarge(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

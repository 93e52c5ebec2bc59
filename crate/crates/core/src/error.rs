use std::path::PathBuf;

use thiserror::Error;

use crate::suite::ProblemDescriptor;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("unknown function id {0}")]
    UnknownFunction(u32),

    #[error("invalid suite specification: {0}")]
    InvalidSuiteSpec(String),

    #[error("{kind} {value} is not available in suite `{suite}`")]
    NotInSuite {
        suite: String,
        kind: &'static str,
        value: u64,
    },

    #[error("suite filter selects no problems")]
    EmptyFilter,

    #[error("suite index {index} out of range for a suite of {len} problems")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("expected a point of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate {value} at position {position}")]
    NonFiniteInput { position: usize, value: f64 },

    #[error("evaluation allowance of {0} exhausted")]
    BudgetExhausted(u64),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing metadata file {}", .0.display())]
    MissingMetadata(PathBuf),

    #[error("unsupported log format version `{found}` (expected `{expected}`)")]
    VersionMismatch { found: String, expected: String },

    #[error("{}:{line}: {reason}", path.display())]
    MalformedLog {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("problem {0} is already being observed")]
    AlreadyObserved(ProblemDescriptor),

    #[error("no successful record available for simulated restarts")]
    NoSuccess,

    #[error("records mix dimensions {0} and {1}")]
    MixedDimensions(usize, usize),

    #[error("empty record list")]
    EmptyRecords,

    #[error("invalid ECDF curve: {0}")]
    InvalidCurve(String),

    #[error("invalid target set: {0}")]
    InvalidTargets(String),

    #[error("unknown optimizer `{0}`")]
    UnknownOptimizer(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("optimizer failed: {0}")]
    Optimizer(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

use crate::bayesopt::Observation;
use crate::svm::SvmModel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Problems found while decoding a binary container (FMX or SVM1).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{extra} trailing bytes after payload")]
    TrailingBytes { extra: usize },
    #[error("non-finite value at element {index}")]
    NonFinite { index: usize },
    #[error("unsupported dtype code {0}")]
    UnsupportedDtype(u8),
    #[error("reserved header bytes must be zero")]
    ReservedNonZero,
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u32),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("format error in {path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("SMO did not converge after {iterations} iterations (KKT residual {residual:.3e})")]
    NotConverged {
        best: Box<SvmModel>,
        residual: f64,
        iterations: usize,
    },
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("tuning aborted after {} evaluations: {source}", history.len())]
    TuneAborted {
        history: Vec<Observation>,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// Process exit code used by the CLI: 2 for bad input or config, 3 for
    /// numeric and convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) | Error::NotConverged { .. } => 3,
            Error::Stage { source, .. } | Error::TuneAborted { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown problem `{0}` (see `kloptim list`)")]
    UnknownProblem(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver failed: {0}")]
    Solver(#[from] kloptim::Error),
    #[error("{path}: {msg}")]
    Schema { path: PathBuf, msg: String },
    #[error("no column `{column}`; available: {}", available.join(", "))]
    MissingColumn { column: String, available: Vec<String> },
    #[error("monitor failure: {0}")]
    Monitor(String),
}

impl CliError {
    /// Process exit status. 1 is reserved for failed suite rows and 2 for
    /// usage errors reported by the argument parser.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownProblem(_) => 3,
            CliError::InvalidParams(_) => 4,
            CliError::Io { .. } => 5,
            CliError::Solver(_) => 6,
            CliError::Schema { .. } => 7,
            CliError::MissingColumn { .. } => 8,
            CliError::Monitor(_) => 9,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::InvalidParams(msg.into()))
}

use std::io;
use std::path::PathBuf;

use bellfilter_core::Error as CoreError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input or configuration, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(
                CoreError::Singular { .. }
                | CoreError::NotRotation
                | CoreError::MarginalSingular { .. }
                | CoreError::NoConvergence { .. }
                | CoreError::MarginalsNotMixed { .. }
                | CoreError::DegenerateCorrelation
                | CoreError::SingularSystem
                | CoreError::BootstrapFailed { .. }
                | CoreError::ZeroProbability { .. },
            ) => 3,
            _ => 2,
        }
    }
}

use std::path::PathBuf;

use elastica_core::assembly::AssemblyError;
use elastica_core::bounds::BoundsError;
use elastica_core::cap1d::CapError;
use elastica_core::EigenError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", .path.display())]
    Format { path: PathBuf, line: usize, message: String },
    #[error("{}: schema mismatch: {message}", .path.display())]
    Schema { path: PathBuf, message: String },
    #[error("assembly: {0}")]
    Assembly(#[from] AssemblyError),
    #[error("eigensolver ({case}): {source}")]
    Eigen {
        case: String,
        #[source]
        source: EigenError,
    },
    #[error("cap ({case}): {source}")]
    Cap {
        case: String,
        #[source]
        source: CapError,
    },
    #[error("spectrum: {0}")]
    Spectrum(#[from] BoundsError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

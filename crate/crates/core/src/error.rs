use thiserror::Error;

use crate::graph::MatrixMode;
use crate::spectral::CentralityVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),

    #[error("matrix mode error: expected {expected}, found {found}")]
    Mode {
        expected: MatrixMode,
        found: MatrixMode,
    },

    /// Eigensolver or iteration failure. `column` names the offending
    /// eigenpair when one exists.
    #[error("numerical error: {message}")]
    Numerical {
        message: String,
        column: Option<usize>,
    },

    /// No admissible eigengap exists, so no centrality analysis is possible.
    /// Carries the all-zero centrality vector when raised from a centrality
    /// computation.
    #[error("degenerate spectrum: {reason}")]
    DegenerateSpectrum {
        reason: String,
        zero_vector: Option<Box<CentralityVector>>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, column: Option<usize>) -> Self {
        Error::Numerical {
            message: msg.into(),
            column,
        }
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Mode { .. } => "mode",
            Error::Numerical { .. } => "numerical",
            Error::DegenerateSpectrum { .. } => "degenerate_spectrum",
            Error::Io(_) => "io",
        }
    }
}

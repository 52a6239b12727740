//! Command-line workbench for controlled Lorenz-type systems: parameter
//! sweeps and CSV/JSON output.

pub mod emit;
pub mod sweep;

use thiserror::Error;

use lorenz_anticontrol::Error as CoreError;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl WorkbenchError {
    /// Process exit code: 2 invalid arguments, 3 numerical failure, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            WorkbenchError::Usage(_) => 2,
            WorkbenchError::Numerical(_) => 3,
            WorkbenchError::Io(_) => 4,
        }
    }
}

impl From<CoreError> for WorkbenchError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DivergedTrajectory(_) | CoreError::ResidualExceeded { .. } | CoreError::LengthMismatch(..) => {
                WorkbenchError::Numerical(e.to_string())
            }
            _ => WorkbenchError::Usage(e.to_string()),
        }
    }
}

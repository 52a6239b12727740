use thiserror::Error;

/// Errors raised by the analysis operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("b = 0: the equilibrium structure is degenerate")]
    DegenerateB,
    #[error("degenerate parameters: {0}")]
    DegenerateParams(&'static str),
    #[error("equilibrium residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualExceeded { residual: f64, tol: f64 },
    #[error("no corollary is stated for the {0} preset")]
    UnsupportedPreset(&'static str),
    #[error("origin is not a saddle with a one-dimensional unstable manifold")]
    NotASaddle,
    #[error("unstable eigenvalue collides with -b; eigendirection is ambiguous")]
    EigenvalueCollision,
    #[error("trajectories have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("base trajectory diverged at t = {0}")]
    DivergedTrajectory(f64),
    #[error("c = {0} is outside the stable regime (0, 1)")]
    NotStableRegime(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short, stable variant name used in tabular output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateB => "DegenerateB",
            Error::DegenerateParams(_) => "DegenerateParams",
            Error::ResidualExceeded { .. } => "ResidualExceeded",
            Error::UnsupportedPreset(_) => "UnsupportedPreset",
            Error::NotASaddle => "NotASaddle",
            Error::EigenvalueCollision => "EigenvalueCollision",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::DivergedTrajectory(_) => "DivergedTrajectory",
            Error::NotStableRegime(_) => "NotStableRegime",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

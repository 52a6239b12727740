//! Controlled Lorenz-type systems
//!
//! ```text
//! x' = a(y - x)
//! y' = cx - xz - y + Mx + Ny + Pxz
//! z' = -bz + xy
//! ```
//!
//! The crate covers the vector field and its named presets (Lorenz, Chen, Lu,
//! T-system), equilibria and the classification of the origin, a
//! Lyapunov-like function with the certificates it licenses, deterministic
//! integration, shooting for the heteroclinic orbits of the origin, and the
//! largest Lyapunov exponent used to confirm that a feedback controller has
//! made the stable Lorenz system chaotic.

pub mod chaos;
pub mod eigen;
pub mod equilibria;
pub mod error;
pub mod integrator;
pub mod lyapunov;
pub mod model;
pub mod orbits;
pub mod sign;

pub use chaos::{
    largest_lyapunov_exponent, largest_lyapunov_exponent_from, regime_classify, suggest_anticontrol,
    AnticontrolSuggestion, LleConfig, LleEstimate, RegimeLabel,
};
pub use equilibria::{
    classify_origin, eigenvalues_at, find_equilibria, origin_eigenvalues, pitchfork_locus, Equilibrium,
    EquilibriumKind, EquilibriumSet, FreeParam, OriginClass,
};
pub use error::{Error, Result};
pub use integrator::{
    integrate, integrate_to_equilibrium, ConvergenceOutcome, IntegratorSettings, Mode, Trajectory,
    TrajectoryStatus,
};
pub use lyapunov::{
    certificate, corollary_check, hypotheses_check, lyapunov_coefficients, v_dot, v_dot_closed_form, v_value,
    CertificateReport, HypothesisFlags, LyapunovCoefficients,
};
pub use model::{apply_symmetry, from_preset, jacobian, vector_field, ParamName, Preset, State, SystemParams};
pub use orbits::{
    branch_symmetry_deviation, trace_heteroclinic, unstable_direction_at_origin, Branch, HeteroclinicResult,
};

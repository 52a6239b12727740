//! Shooting along the one-dimensional unstable manifold of the origin.
//!
//! When the origin is a saddle with `dim W^u = 1`, its unstable manifold
//! splits into a branch with `x > 0` and its mirror image. Each branch is
//! approximated by its tangent line at distance `ε` and integrated forward
//! until it is captured by an equilibrium.

use serde::{Deserialize, Serialize};

use crate::equilibria::{classify_origin, find_equilibria, Equilibrium, OriginClass, DEFAULT_RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::integrator::{run_capture, CaptureTracker, IntegratorSettings, Trajectory, DEFAULT_CAPTURE_RADIUS};
use crate::lyapunov::hypotheses_check;
use crate::model::{apply_symmetry, State, SystemParams};
use crate::sign::DEFAULT_SIGN_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    PlusX,
    MinusX,
}

/// Unit unstable eigenvector of the origin and its eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnstableDirection {
    pub direction: State,
    pub eigenvalue: f64,
}

/// Unstable eigendirection of the origin, oriented with positive x.
///
/// The eigenvector lies in the `z = 0` plane and solves `(-a-λ)x + ay = 0`.
pub fn unstable_direction_at_origin(p: &SystemParams) -> Result<UnstableDirection> {
    if classify_origin(p, DEFAULT_SIGN_TOL) != OriginClass::SaddleWs2Wu1 {
        return Err(Error::NotASaddle);
    }
    let beta = p.a + 1.0 - p.n;
    let lambda = 0.5 * (-beta + (beta * beta + 4.0 * p.a * p.pitchfork_gap()).sqrt());
    if (lambda + p.b).abs() <= 1e-12 * (1.0 + lambda.abs() + p.b.abs()) {
        return Err(Error::EigenvalueCollision);
    }
    let v = State::new(1.0, (p.a + lambda) / p.a, 0.0);
    Ok(UnstableDirection {
        direction: (1.0 / v.norm()) * v,
        eigenvalue: lambda,
    })
}

/// Default shooting offset, `1e-6 (1 + ‖E+‖)`.
pub fn default_epsilon(p: &SystemParams) -> f64 {
    let e_norm = find_equilibria(p, DEFAULT_RESIDUAL_TOL)
        .ok()
        .and_then(|set| set.pair)
        .map_or(0.0, |pair| pair.plus.location.norm());
    1e-6 * (1.0 + e_norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeteroclinicResult {
    pub branch: Branch,
    pub epsilon: f64,
    pub trajectory: Trajectory,
    pub terminal: Option<Equilibrium>,
    pub final_distance: f64,
    /// min x on a PlusX branch, max x on a MinusX branch
    pub extremal_x: f64,
    /// Whether the branch came back within ε/2 of the origin after leaving
    /// the 10ε ball.
    pub reentered_origin: bool,
    /// The parameters satisfy the heteroclinic-pair hypotheses.
    pub certified: bool,
    pub success: bool,
}

/// Follows one branch of the origin's unstable manifold.
pub fn trace_heteroclinic(
    p: &SystemParams,
    branch: Branch,
    epsilon: f64,
    settings: &IntegratorSettings,
) -> Result<HeteroclinicResult> {
    trace_heteroclinic_with_radius(p, branch, epsilon, DEFAULT_CAPTURE_RADIUS, settings)
}

pub fn trace_heteroclinic_with_radius(
    p: &SystemParams,
    branch: Branch,
    epsilon: f64,
    capture_radius: f64,
    settings: &IntegratorSettings,
) -> Result<HeteroclinicResult> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    settings.validate()?;
    let dir = unstable_direction_at_origin(p)?;
    let eqs = find_equilibria(p, DEFAULT_RESIDUAL_TOL)?;
    let plus_start = epsilon * dir.direction;
    let u0 = match branch {
        Branch::PlusX => plus_start,
        Branch::MinusX => apply_symmetry(&plus_start),
    };

    let leave_radius = 10.0 * epsilon;
    let mut left = false;
    let mut reentered = false;
    let mut extremal_x = u0.x;
    let arm_radius = 10.0 * epsilon.max(capture_radius);
    let tracker = CaptureTracker::new(&eqs, capture_radius).arm_origin_after(arm_radius);
    let outcome = run_capture(p, u0, settings, tracker, |s| {
        extremal_x = match branch {
            Branch::PlusX => extremal_x.min(s.x),
            Branch::MinusX => extremal_x.max(s.x),
        };
        let r = s.norm();
        if r > leave_radius {
            left = true;
        } else if left && r < 0.5 * epsilon {
            reentered = true;
        }
    });

    let target = eqs.pair.map(|pair| match branch {
        Branch::PlusX => pair.plus.location,
        Branch::MinusX => pair.minus.location,
    });
    let success = match (outcome.terminal, target) {
        (Some(t), Some(loc)) => t.location == loc && outcome.final_distance <= capture_radius,
        _ => false,
    };
    Ok(HeteroclinicResult {
        branch,
        epsilon,
        trajectory: outcome.trajectory,
        terminal: outcome.terminal,
        final_distance: outcome.final_distance,
        extremal_x,
        reentered_origin: reentered,
        certified: hypotheses_check(p).het_ok,
        success,
    })
}

/// Largest distance between the minus branch and the mirror image of the plus
/// branch over matched steps.
pub fn branch_symmetry_deviation(plus: &HeteroclinicResult, minus: &HeteroclinicResult) -> Result<f64> {
    let a = &plus.trajectory.states;
    let b = &minus.trajectory.states;
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(sp, sm)| sm.distance(&apply_symmetry(sp)))
        .fold(0.0, f64::max))
}

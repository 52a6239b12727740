//! Chaos indicators and anticontrol of the stable Lorenz regime.

use serde::{Deserialize, Serialize};

use crate::equilibria::{classify_origin, find_equilibria, EquilibriumKind, OriginClass, DEFAULT_RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::integrator::{IntegratorSettings, StepError, Stepper};
use crate::lyapunov::certificate;
use crate::model::{jacobian, mat_vec, vector_field, State, SystemParams};
use crate::sign::DEFAULT_SIGN_TOL;

/// Renormalization interval, transient and horizon for the exponent estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LleConfig {
    pub renorm_interval: f64,
    pub transient: f64,
    /// Total integration time, transient included.
    pub horizon: f64,
}

impl Default for LleConfig {
    fn default() -> Self {
        Self {
            renorm_interval: 1.0,
            transient: 50.0,
            horizon: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LleEstimate {
    pub lambda1: f64,
    /// Running estimate after each renormalization past the transient.
    pub history: Vec<f64>,
    pub transient_discarded: f64,
    pub horizon: f64,
}

/// Largest Lyapunov exponent from the variational equation, starting from
/// the tangent vector `(1, 0, 0)`.
pub fn largest_lyapunov_exponent(
    p: &SystemParams,
    u0: State,
    settings: &IntegratorSettings,
    config: &LleConfig,
) -> Result<LleEstimate> {
    largest_lyapunov_exponent_from(p, u0, State::new(1.0, 0.0, 0.0), settings, config)
}

/// Benettin estimate: a tangent vector is evolved with the Jacobian along the
/// orbit, renormalized every `renorm_interval`, and the logarithmic growth is
/// averaged once the transient has passed.
pub fn largest_lyapunov_exponent_from(
    p: &SystemParams,
    u0: State,
    tangent0: State,
    settings: &IntegratorSettings,
    config: &LleConfig,
) -> Result<LleEstimate> {
    settings.validate()?;
    let LleConfig {
        renorm_interval,
        transient,
        horizon,
    } = *config;
    if !(renorm_interval > 0.0 && transient > 0.0 && horizon > transient) {
        return Err(Error::InvalidArgument(format!(
            "need horizon > transient > 0 and renorm_interval > 0: {config:?}"
        )));
    }
    let t_norm = tangent0.norm();
    if !(t_norm > 0.0 && t_norm.is_finite()) {
        return Err(Error::InvalidArgument("tangent vector must be non-zero".into()));
    }
    let tangent0 = (1.0 / t_norm) * tangent0;

    let params = *p;
    let field = move |w: &[f64; 6]| {
        let s = State::new(w[0], w[1], w[2]);
        let v = State::new(w[3], w[4], w[5]);
        let f = vector_field(&params, &s);
        let dv = mat_vec(&jacobian(&params, &s), &v);
        [f.x, f.y, f.z, dv.x, dv.y, dv.z]
    };
    let y0 = [u0.x, u0.y, u0.z, tangent0.x, tangent0.y, tangent0.z];
    let mut stepper = Stepper::new(field, y0, *settings);

    let mut log_sum = 0.0;
    let mut measured = 0.0;
    let mut history = Vec::new();
    let mut interval = 0u64;
    loop {
        interval += 1;
        let t_end = (interval as f64 * renorm_interval).min(horizon);
        let t_start = stepper.t;
        while stepper.t < t_end {
            match stepper.step(t_end) {
                Ok(()) => {}
                Err(StepError::NonFinite) | Err(StepError::StepTooSmall) => {
                    return Err(Error::DivergedTrajectory(stepper.t));
                }
            }
            let base = State::new(stepper.y[0], stepper.y[1], stepper.y[2]);
            if base.norm() > settings.blowup_norm {
                return Err(Error::DivergedTrajectory(stepper.t));
            }
        }
        let v = State::new(stepper.y[3], stepper.y[4], stepper.y[5]);
        let growth = v.norm();
        if !(growth > 0.0 && growth.is_finite()) {
            return Err(Error::DivergedTrajectory(stepper.t));
        }
        let v = (1.0 / growth) * v;
        stepper.y[3] = v.x;
        stepper.y[4] = v.y;
        stepper.y[5] = v.z;
        if t_start >= transient - 1e-9 * renorm_interval {
            log_sum += growth.ln();
            measured += t_end - t_start;
            history.push(log_sum / measured);
        }
        if t_end >= horizon {
            break;
        }
    }
    if history.is_empty() {
        return Err(Error::InvalidArgument(
            "horizon leaves no renormalization interval after the transient".into(),
        ));
    }
    Ok(LleEstimate {
        lambda1: *history.last().unwrap(),
        history,
        transient_discarded: transient,
        horizon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// Every orbit converges to an equilibrium.
    ProvablyRegular,
    /// `b < 2a` and the three equilibria are all unstable.
    ChaosCandidate,
    Undetermined,
}

impl RegimeLabel {
    pub fn name(&self) -> &'static str {
        match self {
            RegimeLabel::ProvablyRegular => "ProvablyRegular",
            RegimeLabel::ChaosCandidate => "ChaosCandidate",
            RegimeLabel::Undetermined => "Undetermined",
        }
    }
}

pub fn regime_classify(p: &SystemParams) -> RegimeLabel {
    let cert = certificate(p);
    if cert.converges_to_equilibria {
        return RegimeLabel::ProvablyRegular;
    }
    if !cert.chaos_possible {
        return RegimeLabel::Undetermined;
    }
    let origin_unstable = matches!(
        classify_origin(p, DEFAULT_SIGN_TOL),
        OriginClass::SaddleWs2Wu1 | OriginClass::SaddleWs1Wu2
    );
    let pair_unstable = match find_equilibria(p, DEFAULT_RESIDUAL_TOL) {
        Ok(set) if set.kind == EquilibriumKind::Triple => set
            .pair
            .is_some_and(|pair| pair.plus.is_unstable() && pair.minus.is_unstable()),
        _ => false,
    };
    if origin_unstable && pair_unstable {
        RegimeLabel::ChaosCandidate
    } else {
        RegimeLabel::Undetermined
    }
}

/// A controller `u = Mx` pushing the stable Lorenz system past its pitchfork.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnticontrolSuggestion {
    pub params: SystemParams,
    pub margin: f64,
    /// `M + N + c - 1 > 0` for the controlled system.
    pub pitchfork_crossed: bool,
    pub origin_class: OriginClass,
    pub equilibrium_kind: EquilibriumKind,
    /// The necessary condition `b < 2a` for chaos.
    pub necessary_condition_holds: bool,
    pub chaos_guaranteed: bool,
    pub note: String,
}

/// Controller `(M, N, P) = ((1-c) + margin, 0, 0)` for the Lorenz system with
/// `0 < c < 1`, so that `M + N + c - 1 = margin`.
///
/// Crossing the pitchfork is necessary, not sufficient, for chaos; the report
/// never claims chaos. Check it with [`largest_lyapunov_exponent`].
pub fn suggest_anticontrol(a: f64, b: f64, c: f64, margin: f64) -> Result<AnticontrolSuggestion> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::NotStableRegime(c));
    }
    if !(a > 0.0 && b > 0.0 && margin > 0.0) || !(a.is_finite() && b.is_finite() && margin.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need a > 0, b > 0, margin > 0 (a = {a}, b = {b}, margin = {margin})"
        )));
    }
    let params = SystemParams {
        a,
        b,
        c,
        m: (1.0 - c) + margin,
        n: 0.0,
        p: 0.0,
    };
    let necessary = certificate(&params).chaos_possible;
    let origin_class = classify_origin(&params, DEFAULT_SIGN_TOL);
    let equilibrium_kind = find_equilibria(&params, DEFAULT_RESIDUAL_TOL)?.kind;
    let pitchfork_crossed = params.pitchfork_gap() > 0.0;
    let note = if necessary {
        "pitchfork crossed; b < 2a holds, chaos not guaranteed".to_string()
    } else {
        "pitchfork crossed; b >= 2a, chaos excluded".to_string()
    };
    Ok(AnticontrolSuggestion {
        params,
        margin,
        pitchfork_crossed,
        origin_class,
        equilibrium_kind,
        necessary_condition_holds: necessary,
        chaos_guaranteed: false,
        note,
    })
}

//! Lyapunov-like function and the certificates it licenses.
//!
//! ```text
//! V(x,y,z) = A (x-y)² + (bz - x²)² + B (x² - K)²
//! A = b(b-2a)/(1-P),  B = (b-2a)/(2a),  K = b(M+N+c-1)/(1-P)
//! ```
//!
//! The middle term is `(bz - x²)²`. With this choice the orbital derivative is
//! exactly `-2A(a+1-N)(x-y)² - 2b(bz-x²)²`: the cross terms in
//! `x(x-y)(bz-x²)` coming from the first and third terms cancel against the
//! middle one. The variant `(z - x²/b)²` leaves a residual cross term.
//!
//! All certificate flags are sufficient conditions. A `false` means "not
//! certified", never "disproved".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{vector_field, Preset, State, SystemParams};
use crate::sign::{self, DEFAULT_SIGN_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCoefficients {
    /// Coefficient of `(x-y)²`.
    pub a_coef: f64,
    /// Coefficient of `(x²-K)²`.
    pub b_coef: f64,
    /// `b(M+N+c-1)/(1-P)`, the squared x-coordinate of `E±`.
    pub k: f64,
}

pub fn lyapunov_coefficients(p: &SystemParams) -> Result<LyapunovCoefficients> {
    if p.a == 0.0 {
        return Err(Error::DegenerateParams("a = 0"));
    }
    if p.p == 1.0 {
        return Err(Error::DegenerateParams("P = 1"));
    }
    let one_minus_p = 1.0 - p.p;
    let b_minus_2a = p.b - 2.0 * p.a;
    Ok(LyapunovCoefficients {
        a_coef: p.b * b_minus_2a / one_minus_p,
        b_coef: b_minus_2a / (2.0 * p.a),
        k: p.b * p.pitchfork_gap() / one_minus_p,
    })
}

impl LyapunovCoefficients {
    pub fn value(&self, p: &SystemParams, s: &State) -> f64 {
        let d = s.x - s.y;
        let w = p.b * s.z - s.x * s.x;
        let q = s.x * s.x - self.k;
        self.a_coef * d * d + w * w + self.b_coef * q * q
    }

    /// Analytic gradient of [`Self::value`].
    pub fn gradient(&self, p: &SystemParams, s: &State) -> State {
        let d = s.x - s.y;
        let w = p.b * s.z - s.x * s.x;
        let q = s.x * s.x - self.k;
        State {
            x: 2.0 * self.a_coef * d - 4.0 * s.x * w + 4.0 * self.b_coef * s.x * q,
            y: -2.0 * self.a_coef * d,
            z: 2.0 * p.b * w,
        }
    }

    /// `∇V · f`, by the chain rule.
    pub fn derivative(&self, p: &SystemParams, s: &State) -> f64 {
        self.gradient(p, s).dot(&vector_field(p, s))
    }

    /// `-2A(a+1-N)(x-y)² - 2b(bz-x²)²`
    pub fn derivative_closed_form(&self, p: &SystemParams, s: &State) -> f64 {
        let d = s.x - s.y;
        let w = p.b * s.z - s.x * s.x;
        -2.0 * self.a_coef * (p.a + 1.0 - p.n) * d * d - 2.0 * p.b * w * w
    }
}

pub fn v_value(p: &SystemParams, s: &State) -> Result<f64> {
    Ok(lyapunov_coefficients(p)?.value(p, s))
}

/// Orbital derivative of `V` along the flow, via the chain rule.
pub fn v_dot(p: &SystemParams, s: &State) -> Result<f64> {
    Ok(lyapunov_coefficients(p)?.derivative(p, s))
}

pub fn v_dot_closed_form(p: &SystemParams, s: &State) -> Result<f64> {
    Ok(lyapunov_coefficients(p)?.derivative_closed_form(p, s))
}

/// The three nested hypothesis sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    /// `a > 0, b > 0, (b-2a)/(1-P) >= 0, N-1-a <= 0`
    pub lemma_ok: bool,
    /// adds `b-2a >= 0, P < 1`
    pub conv_ok: bool,
    /// adds `c+M > 0, (M+N+c-1)/(1-P) > 0`
    pub het_ok: bool,
}

fn band(terms: &[f64]) -> f64 {
    DEFAULT_SIGN_TOL * (1.0 + terms.iter().map(|t| t.abs()).sum::<f64>())
}

pub fn hypotheses_check(p: &SystemParams) -> HypothesisFlags {
    let one_minus_p = 1.0 - p.p;
    let p_regular = one_minus_p.abs() > crate::equilibria::P_DEGENERACY_TOL * (1.0 + p.p.abs());
    let b_minus_2a = p.b - 2.0 * p.a;

    let lemma_ok = sign::positive(p.a, 0.0)
        && sign::positive(p.b, 0.0)
        && p_regular
        && sign::non_negative(b_minus_2a / one_minus_p, band(&[p.b, 2.0 * p.a]) / one_minus_p.abs())
        && sign::non_positive(p.n - 1.0 - p.a, band(&[p.n, 1.0, p.a]));

    let conv_ok = lemma_ok
        && sign::non_negative(b_minus_2a, band(&[p.b, 2.0 * p.a]))
        && sign::negative(p.p - 1.0, band(&[p.p, 1.0]));

    let het_ok = conv_ok
        && sign::positive(p.c + p.m, band(&[p.c, p.m]))
        && sign::positive(
            p.pitchfork_gap() / one_minus_p,
            band(&[p.m, p.n, p.c, 1.0]) / one_minus_p.abs(),
        );

    HypothesisFlags {
        lemma_ok,
        conv_ok,
        het_ok,
    }
}

/// Conclusions licensed by the hypothesis flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub flags: HypothesisFlags,
    pub no_closed_orbits: bool,
    pub no_homoclinic: bool,
    pub converges_to_equilibria: bool,
    pub heteroclinic_pair: bool,
    /// Necessary condition `b < 2a`; chaos is excluded when it fails.
    pub chaos_possible: bool,
}

pub fn certificate(p: &SystemParams) -> CertificateReport {
    let flags = hypotheses_check(p);
    CertificateReport {
        flags,
        no_closed_orbits: flags.lemma_ok,
        no_homoclinic: flags.lemma_ok,
        converges_to_equilibria: flags.conv_ok,
        heteroclinic_pair: flags.het_ok,
        chaos_possible: sign::negative(p.b - 2.0 * p.a, band(&[p.b, 2.0 * p.a])),
    }
}

/// Evaluates the preset-specific corollary conditions as stated.
///
/// * Lorenz: `c > 1` and `b >= 2a > 0`
/// * Chen: `2c - a > 0` and `(b-2a)(c-a) <= 0`
/// * T-system: `c - a > 0` and `b - 2a <= 0`
///
/// The Chen and T-system conditions are not implied by the general
/// hypothesis set under their preset mappings (for the T-system `1-P = a`,
/// so the general set needs `b - 2a >= 0`). They are reproduced as stated.
pub fn corollary_check(preset: Preset, a: f64, b: f64, c: f64) -> Result<bool> {
    let b2a = b - 2.0 * a;
    let bb = band(&[b, 2.0 * a]);
    match preset {
        Preset::Lorenz => Ok(sign::positive(c - 1.0, band(&[c, 1.0]))
            && sign::non_negative(b2a, bb)
            && sign::positive(2.0 * a, 0.0)),
        Preset::Chen => Ok(sign::positive(2.0 * c - a, band(&[2.0 * c, a]))
            && sign::non_positive(b2a * (c - a), bb * band(&[c, a]) / DEFAULT_SIGN_TOL)),
        Preset::TSystem => Ok(sign::positive(c - a, band(&[c, a])) && sign::non_positive(b2a, bb)),
        Preset::Lu => Err(Error::UnsupportedPreset("Lu")),
    }
}

//! Equilibria, their spectra, and the classification of the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, inertia, sort_eigenvalues};
use crate::error::{Error, Result};
use crate::model::{apply_symmetry, from_preset, jacobian, vector_field, Preset, State, SystemParams};
use crate::sign::{self, DEFAULT_SIGN_TOL};

/// Default residual tolerance for equilibrium locations.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

/// Threshold below which `1 - P` is treated as zero, relative to `1 + |P|`.
pub const P_DEGENERACY_TOL: f64 = 1e-12;

/// Type of the origin according to the signs of `a(M+N+c-1)` and `N-a-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OriginClass {
    /// dim W^s = 2, dim W^u = 1
    SaddleWs2Wu1,
    /// dim W^s = 1, dim W^u = 2
    SaddleWs1Wu2,
    Attractor,
    NonHyperbolic,
    /// `b <= 0`; the classification assumes `b > 0`.
    OutOfHypotheses,
}

impl OriginClass {
    pub fn name(&self) -> &'static str {
        match self {
            OriginClass::SaddleWs2Wu1 => "SaddleWs2Wu1",
            OriginClass::SaddleWs1Wu2 => "SaddleWs1Wu2",
            OriginClass::Attractor => "Attractor",
            OriginClass::NonHyperbolic => "NonHyperbolic",
            OriginClass::OutOfHypotheses => "OutOfHypotheses",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub location: State,
    /// Sorted by descending real part.
    pub eigenvalues: [Complex64; 3],
    pub stable_dim: usize,
    pub unstable_dim: usize,
    pub center_dim: usize,
}

impl Equilibrium {
    fn with_eigenvalues(location: State, eigenvalues: [Complex64; 3]) -> Self {
        let size = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (stable_dim, unstable_dim, center_dim) = inertia(&eigenvalues, 1e-10 * (1.0 + size));
        Self {
            location,
            eigenvalues,
            stable_dim,
            unstable_dim,
            center_dim,
        }
    }

    /// Builds the record for `location`, taking the spectrum of the Jacobian there.
    pub fn at(p: &SystemParams, location: State) -> Self {
        if location == State::ORIGIN {
            Self::with_eigenvalues(location, origin_eigenvalues(p))
        } else {
            Self::with_eigenvalues(location, eigenvalues_at(p, &location))
        }
    }

    pub fn is_unstable(&self) -> bool {
        self.unstable_dim > 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquilibriumKind {
    OriginOnly,
    Triple,
    /// `P = 1` and `M+N+c-1 = 0`: the curve `(x, x, x²/b)` consists of equilibria.
    Continuum,
}

impl EquilibriumKind {
    pub fn name(&self) -> &'static str {
        match self {
            EquilibriumKind::OriginOnly => "OriginOnly",
            EquilibriumKind::Triple => "Triple",
            EquilibriumKind::Continuum => "Continuum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPair {
    pub plus: Equilibrium,
    pub minus: Equilibrium,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub kind: EquilibriumKind,
    pub origin: Equilibrium,
    pub pair: Option<EquilibriumPair>,
    /// Needed to describe the continuum `z = x²/b`.
    #[serde(skip)]
    pub b: f64,
}

impl EquilibriumSet {
    pub fn count(&self) -> Option<usize> {
        match self.kind {
            EquilibriumKind::OriginOnly => Some(1),
            EquilibriumKind::Triple => Some(3),
            EquilibriumKind::Continuum => None,
        }
    }

    pub fn isolated(&self) -> Vec<&Equilibrium> {
        let mut v = vec![&self.origin];
        if let Some(pair) = &self.pair {
            v.push(&pair.plus);
            v.push(&pair.minus);
        }
        v
    }

    /// Closest known equilibrium location to `s` and its distance.
    ///
    /// For a continuum the candidate is the curve point `(m, m, m²/b)` with
    /// `m = (x + y)/2`, which is not the exact foot point but converges to it.
    pub fn nearest(&self, s: &State) -> (State, f64) {
        let mut best = (self.origin.location, s.distance(&self.origin.location));
        if let Some(pair) = &self.pair {
            for e in [&pair.plus, &pair.minus] {
                let d = s.distance(&e.location);
                if d < best.1 {
                    best = (e.location, d);
                }
            }
        }
        if self.kind == EquilibriumKind::Continuum {
            let m = 0.5 * (s.x + s.y);
            let on_curve = State::new(m, m, m * m / self.b);
            let d = s.distance(&on_curve);
            if d < best.1 {
                best = (on_curve, d);
            }
        }
        best
    }
}

/// All equilibria of the controlled system.
///
/// `E± = (±s, ±s, z*)` with `z* = (M+N+c-1)/(1-P)` and `s² = b z*` whenever
/// `s² > 0`; `E-` is the exact mirror image of `E+`.
pub fn find_equilibria(p: &SystemParams, residual_tol: f64) -> Result<EquilibriumSet> {
    if p.b == 0.0 {
        return Err(Error::DegenerateB);
    }
    let origin = Equilibrium::at(p, State::ORIGIN);
    let gap = p.pitchfork_gap();
    let one_minus_p = 1.0 - p.p;

    if one_minus_p.abs() <= P_DEGENERACY_TOL * (1.0 + p.p.abs()) {
        let gap_band = DEFAULT_SIGN_TOL * (1.0 + p.m.abs() + p.n.abs() + p.c.abs() + 1.0);
        let kind = if sign::near_zero(gap, gap_band) {
            EquilibriumKind::Continuum
        } else {
            EquilibriumKind::OriginOnly
        };
        return Ok(EquilibriumSet {
            kind,
            origin,
            pair: None,
            b: p.b,
        });
    }

    let z_star = gap / one_minus_p;
    let s2 = p.b * z_star;
    let band = DEFAULT_SIGN_TOL
        * (1.0 + p.b.abs() * (1.0 + p.m.abs() + p.n.abs() + p.c.abs()) / one_minus_p.abs());
    if !sign::positive(s2, band) {
        return Ok(EquilibriumSet {
            kind: EquilibriumKind::OriginOnly,
            origin,
            pair: None,
            b: p.b,
        });
    }

    let s = s2.sqrt();
    let plus_loc = State::new(s, s, z_star);
    let minus_loc = apply_symmetry(&plus_loc);
    for loc in [plus_loc, minus_loc] {
        let residual = vector_field(p, &loc).norm();
        if residual > residual_tol {
            return Err(Error::ResidualExceeded {
                residual,
                tol: residual_tol,
            });
        }
    }
    Ok(EquilibriumSet {
        kind: EquilibriumKind::Triple,
        origin,
        pair: Some(EquilibriumPair {
            plus: Equilibrium::at(p, plus_loc),
            minus: Equilibrium::at(p, minus_loc),
        }),
        b: p.b,
    })
}

/// Spectrum of the Jacobian at the origin.
///
/// Returns the roots of `λ² + (a+1-N)λ - a(M+N+c-1)` sorted by descending
/// real part, followed by `-b`.
pub fn origin_eigenvalues(p: &SystemParams) -> [Complex64; 3] {
    let beta = p.a + 1.0 - p.n;
    let gamma = -p.a * p.pitchfork_gap();
    let disc = beta * beta - 4.0 * gamma;
    let mut quad = if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (beta + if beta >= 0.0 { sq } else { -sq });
        if q == 0.0 {
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [Complex64::new(q, 0.0), Complex64::new(gamma / q, 0.0)]
        }
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(-0.5 * beta, im), Complex64::new(-0.5 * beta, -im)]
    };
    sort_eigenvalues(&mut quad);
    [quad[0], quad[1], Complex64::new(-p.b, 0.0)]
}

/// Scale used to turn the relative sign tolerance into an absolute band.
pub fn classification_scale(p: &SystemParams) -> f64 {
    1.0 + p.a.abs() * (1.0 + p.m.abs() + p.n.abs() + p.c.abs()) * (1.0 + (p.n - p.a - 1.0).abs())
}

/// Type of the origin from the signs of `a(M+N+c-1)` and `N-a-1`.
///
/// When `a(M+N+c-1) > 0` the origin is a saddle whatever `N-a-1` is; the
/// non-hyperbolic band applies to `a(M+N+c-1)` itself and to `N-a-1` only
/// on the branch `a(M+N+c-1) < 0` where it decides the trace.
pub fn classify_origin(p: &SystemParams, tol: f64) -> OriginClass {
    if p.b <= 0.0 {
        return OriginClass::OutOfHypotheses;
    }
    let band = tol * classification_scale(p);
    let det_term = p.a * p.pitchfork_gap();
    let trace_term = p.n - p.a - 1.0;
    if sign::positive(det_term, band) {
        OriginClass::SaddleWs2Wu1
    } else if sign::negative(det_term, band) {
        if sign::positive(trace_term, band) {
            OriginClass::SaddleWs1Wu2
        } else if sign::negative(trace_term, band) {
            OriginClass::Attractor
        } else {
            OriginClass::NonHyperbolic
        }
    } else {
        OriginClass::NonHyperbolic
    }
}

/// Eigenvalues of the Jacobian at `s`, sorted by descending real part.
pub fn eigenvalues_at(p: &SystemParams, s: &State) -> [Complex64; 3] {
    eigen::eigenvalues3(&jacobian(p, s))
}

/// Coordinate left free when locating the pitchfork.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeParam {
    M,
    N,
    C,
}

/// Critical value of `free` solving `M + N + c - 1 = 0`, others held fixed.
pub fn pitchfork_locus(p: &SystemParams, free: FreeParam) -> f64 {
    match free {
        FreeParam::M => 1.0 - p.n - p.c,
        FreeParam::N => 1.0 - p.m - p.c,
        FreeParam::C => 1.0 - p.m - p.n,
    }
}

/// Critical `c` along a preset family, where `M` and `N` may depend on `c`.
///
/// `M+N+c-1` is affine in `c` for every preset; `None` if it does not depend
/// on `c` at all.
pub fn preset_pitchfork_c(preset: Preset, a: f64, b: f64) -> Option<f64> {
    let at0 = from_preset(preset, a, b, 0.0).pitchfork_gap();
    let at1 = from_preset(preset, a, b, 1.0).pitchfork_gap();
    let slope = at1 - at0;
    (slope != 0.0).then(|| -at0 / slope)
}

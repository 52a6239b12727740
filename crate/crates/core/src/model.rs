//! Parameter space, phase space and the controlled vector field
//!
//! ```text
//! x' = a(y - x)
//! y' = cx - xz - y + Mx + Ny + Pxz
//! z' = -bz + xy
//! ```
//!
//! The feedback term `u = Mx + Ny + Pxz` turns the classic Lorenz system into a
//! family that also contains the Chen, Lu and T-systems.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six real parameters `(a, b, c, M, N, P)` of one controlled system.
///
/// No sign constraints are enforced here; every analysis checks its own
/// hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

impl SystemParams {
    pub fn new(a: f64, b: f64, c: f64, m: f64, n: f64, p: f64) -> Result<Self> {
        let params = Self { a, b, c, m, n, p };
        if params.as_array().iter().all(|v| v.is_finite()) {
            Ok(params)
        } else {
            Err(Error::InvalidArgument(format!(
                "parameters must be finite: {params:?}"
            )))
        }
    }

    /// Uncontrolled Lorenz system, `M = N = P = 0`.
    pub fn lorenz(a: f64, b: f64, c: f64) -> Self {
        from_preset(Preset::Lorenz, a, b, c)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.m, self.n, self.p]
    }

    /// `M + N + c - 1`, the quantity whose sign change is the pitchfork.
    pub fn pitchfork_gap(&self) -> f64 {
        self.m + self.n + self.c - 1.0
    }

    /// Value of a parameter addressed by name (`a b c M N P`).
    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::A => self.a,
            ParamName::B => self.b,
            ParamName::C => self.c,
            ParamName::M => self.m,
            ParamName::N => self.n,
            ParamName::P => self.p,
        }
    }

    pub fn with(mut self, name: ParamName, value: f64) -> Self {
        match name {
            ParamName::A => self.a = value,
            ParamName::B => self.b = value,
            ParamName::C => self.c = value,
            ParamName::M => self.m = value,
            ParamName::N => self.n = value,
            ParamName::P => self.p = value,
        }
        self
    }
}

/// Parameter names, used by sweeps and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamName {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    M,
    N,
    P,
}

impl ParamName {
    pub const ALL: [ParamName; 6] = [
        ParamName::A,
        ParamName::B,
        ParamName::C,
        ParamName::M,
        ParamName::N,
        ParamName::P,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ParamName::A => "a",
            ParamName::B => "b",
            ParamName::C => "c",
            ParamName::M => "M",
            ParamName::N => "N",
            ParamName::P => "P",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown parameter '{s}'")))
    }
}

/// Named members of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    Lorenz,
    Chen,
    Lu,
    TSystem,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Lorenz => "Lorenz",
            Preset::Chen => "Chen",
            Preset::Lu => "Lu",
            Preset::TSystem => "TSystem",
        }
    }
}

/// Maps a named system onto the controlled family.
///
/// The Lorenz preset uses `x' = a(y - x)`, the form consistent with the
/// controlled family at `M = N = P = 0`.
pub fn from_preset(preset: Preset, a: f64, b: f64, c: f64) -> SystemParams {
    let (m, n, p) = match preset {
        Preset::Lorenz => (0.0, 0.0, 0.0),
        Preset::Chen => (-a, 1.0 + c, 0.0),
        Preset::Lu => (-c, 1.0 + c, 0.0),
        Preset::TSystem => (-a, 1.0, 1.0 - a),
    };
    SystemParams { a, b, c, m, n, p }
}

/// A point `(x, y, z)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State {
    pub const ORIGIN: State = State {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &State) -> f64 {
        (*self - *other).norm()
    }

    pub fn dot(&self, other: &State) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, o: State) -> State {
        State::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<State> for f64 {
    type Output = State;
    fn mul(self, s: State) -> State {
        State::new(self * s.x, self * s.y, self * s.z)
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        State::new(-self.x, -self.y, -self.z)
    }
}

/// Right-hand side of the controlled system.
///
/// The middle component is summed in the order `cx - xz - y + Mx + Ny + Pxz`,
/// so `M = N = P = 0` reproduces the Lorenz field bit-for-bit. Every monomial
/// is odd or even in `(x, y)`, so the Oz-symmetry also holds bit-exactly.
pub fn vector_field(p: &SystemParams, s: &State) -> State {
    State {
        x: p.a * (s.y - s.x),
        y: p.c * s.x - s.x * s.z - s.y + p.m * s.x + p.n * s.y + p.p * s.x * s.z,
        z: -p.b * s.z + s.x * s.y,
    }
}

/// Row-major 3x3 matrix.
pub type Mat3 = [[f64; 3]; 3];

/// Jacobian of [`vector_field`] at `s`.
pub fn jacobian(p: &SystemParams, s: &State) -> Mat3 {
    [
        [-p.a, p.a, 0.0],
        [p.c + p.m - (1.0 - p.p) * s.z, p.n - 1.0, -(1.0 - p.p) * s.x],
        [s.y, s.x, -p.b],
    ]
}

pub fn mat_vec(m: &Mat3, v: &State) -> State {
    State {
        x: m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        y: m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        z: m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    }
}

/// Reflection through the Oz axis, `(x, y, z) -> (-x, -y, z)`.
pub fn apply_symmetry(s: &State) -> State {
    State::new(-s.x, -s.y, s.z)
}

//! Deterministic integration of the controlled system.
//!
//! Two schemes are provided: classic fixed-step RK4 and the Dormand–Prince
//! 5(4) embedded pair with a standard step controller. The steppers are
//! generic over the state dimension so the variational system used for
//! Lyapunov exponents shares the same code.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::equilibria::{Equilibrium, EquilibriumSet};
use crate::error::{Error, Result};
use crate::model::{vector_field, State, SystemParams};

pub const DEFAULT_CAPTURE_RADIUS: f64 = 1e-6;
/// Consecutive step endpoints that must lie inside the capture ball.
pub const CAPTURE_DWELL_CHECKS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    FixedRk4,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub mode: Mode,
    /// Fixed step for RK4, initial step for the adaptive scheme.
    pub dt_init: f64,
    /// Upper bound on adaptive steps.
    pub max_step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_max: f64,
    pub max_steps: usize,
    pub blowup_norm: f64,
    /// Integrate the negated field (reverse time); recorded times stay positive.
    pub backward: bool,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            mode: Mode::Adaptive,
            dt_init: 1e-3,
            max_step: 0.1,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            t_max: 200.0,
            max_steps: 5_000_000,
            blowup_norm: 1e6,
            backward: false,
        }
    }
}

impl IntegratorSettings {
    pub fn fixed(dt: f64, t_max: f64) -> Self {
        Self {
            mode: Mode::FixedRk4,
            dt_init: dt,
            t_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.dt_init)
            || !positive(self.max_step)
            || !positive(self.rel_tol)
            || !positive(self.abs_tol)
            || !positive(self.t_max)
            || !positive(self.blowup_norm)
            || self.max_steps == 0
        {
            return Err(Error::InvalidArgument(format!(
                "integrator settings must be positive: {self:?}"
            )));
        }
        Ok(())
    }

    /// Local error tolerance used for a state of norm `norm`.
    pub fn step_tolerance(&self, norm: f64) -> f64 {
        self.rel_tol * norm + self.abs_tol
    }
}

fn norm<const D: usize>(v: &[f64; D]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// One classic RK4 step.
pub fn rk4_step<F, const D: usize>(f: &F, y: &[f64; D], h: f64) -> [f64; D]
where
    F: Fn(&[f64; D]) -> [f64; D],
{
    let k1 = f(y);
    let k2 = f(&axpy(y, h, &[(0.5, &k1)]));
    let k3 = f(&axpy(y, h, &[(0.5, &k2)]));
    let k4 = f(&axpy(y, h, &[(1.0, &k3)]));
    axpy(y, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)])
}

/// One Dormand–Prince trial step. Returns the 5th-order solution, the error
/// estimate and the derivative at the new point (first stage of the next step).
fn dopri5_trial<F, const D: usize>(
    f: &F,
    y: &[f64; D],
    k1: &[f64; D],
    h: f64,
) -> ([f64; D], [f64; D], [f64; D])
where
    F: Fn(&[f64; D]) -> [f64; D],
{
    let k2 = f(&axpy(y, h, &[(1.0 / 5.0, k1)]));
    let k3 = f(&axpy(y, h, &[(3.0 / 40.0, k1), (9.0 / 40.0, &k2)]));
    let k4 = f(&axpy(
        y,
        h,
        &[(44.0 / 45.0, k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)],
    ));
    let k5 = f(&axpy(
        y,
        h,
        &[
            (19372.0 / 6561.0, k1),
            (-25360.0 / 2187.0, &k2),
            (64448.0 / 6561.0, &k3),
            (-212.0 / 729.0, &k4),
        ],
    ));
    let k6 = f(&axpy(
        y,
        h,
        &[
            (9017.0 / 3168.0, k1),
            (-355.0 / 33.0, &k2),
            (46732.0 / 5247.0, &k3),
            (49.0 / 176.0, &k4),
            (-5103.0 / 18656.0, &k5),
        ],
    ));
    let y_new = axpy(
        y,
        h,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, &k3),
            (125.0 / 192.0, &k4),
            (-2187.0 / 6784.0, &k5),
            (11.0 / 84.0, &k6),
        ],
    );
    let k7 = f(&y_new);
    let mut err = [0.0; D];
    for (i, e) in err.iter_mut().enumerate() {
        *e = h
            * (71.0 / 57600.0 * k1[i] - 71.0 / 16695.0 * k3[i] + 71.0 / 1920.0 * k4[i]
                - 17253.0 / 339200.0 * k5[i]
                + 22.0 / 525.0 * k6[i]
                - 1.0 / 40.0 * k7[i]);
    }
    (y_new, err, k7)
}

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepError {
    StepTooSmall,
    NonFinite,
}

/// Incremental integrator for an autonomous system of dimension `D`.
pub struct Stepper<F, const D: usize> {
    f: F,
    settings: IntegratorSettings,
    pub t: f64,
    pub y: [f64; D],
    h: f64,
    fsal: Option<[f64; D]>,
    pub accepted: usize,
    pub rejected: usize,
}

impl<F, const D: usize> Stepper<F, D>
where
    F: Fn(&[f64; D]) -> [f64; D],
{
    pub fn new(f: F, y0: [f64; D], settings: IntegratorSettings) -> Self {
        Self {
            f,
            settings,
            t: 0.0,
            y: y0,
            h: match settings.mode {
                Mode::Adaptive => settings.dt_init.min(settings.max_step),
                Mode::FixedRk4 => settings.dt_init,
            },
            fsal: None,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Advances by one accepted step without passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> std::result::Result<(), StepError> {
        let remaining = t_end - self.t;
        match self.settings.mode {
            Mode::FixedRk4 => {
                let dt = self.settings.dt_init;
                // snap onto t_end rather than leave a sliver of a step
                let (h, t_next) = if dt >= remaining - 1e-9 * dt {
                    (remaining, t_end)
                } else {
                    (dt, self.t + dt)
                };
                self.y = rk4_step(&self.f, &self.y, h);
                self.t = t_next;
                self.accepted += 1;
            }
            Mode::Adaptive => loop {
                let h = if self.h >= remaining - 1e-9 * self.h {
                    remaining
                } else {
                    self.h
                };
                if h <= 1e-14 * self.t.abs().max(1.0) {
                    return Err(StepError::StepTooSmall);
                }
                let k1 = match self.fsal {
                    Some(k) => k,
                    None => (self.f)(&self.y),
                };
                let (y_new, err, k7) = dopri5_trial(&self.f, &self.y, &k1, h);
                let scale = self
                    .settings
                    .step_tolerance(norm(&self.y).max(norm(&y_new)));
                let err_ratio = norm(&err) / scale;
                if !err_ratio.is_finite() {
                    // overflow inside the trial: shrink and retry
                    self.rejected += 1;
                    self.h = h * MIN_FACTOR;
                    self.fsal = Some(k1);
                    continue;
                }
                if err_ratio <= 1.0 {
                    let factor = if err_ratio == 0.0 {
                        MAX_FACTOR
                    } else {
                        (SAFETY * err_ratio.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                    };
                    self.y = y_new;
                    self.t = if h == remaining { t_end } else { self.t + h };
                    self.fsal = Some(k7);
                    // a step clipped at t_end says nothing about the next one
                    if h >= self.h {
                        self.h = (h * factor).min(self.settings.max_step);
                    }
                    self.accepted += 1;
                    break;
                }
                self.rejected += 1;
                self.fsal = Some(k1);
                self.h = h * (SAFETY * err_ratio.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            },
        }
        if self.y.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(StepError::NonFinite)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryStatus {
    CompletedTspan,
    CapturedEquilibrium,
    Diverged,
    StepLimit,
}

impl TrajectoryStatus {
    pub fn name(&self) -> &'static str {
        match self {
            TrajectoryStatus::CompletedTspan => "CompletedTspan",
            TrajectoryStatus::CapturedEquilibrium => "CapturedEquilibrium",
            TrajectoryStatus::Diverged => "Diverged",
            TrajectoryStatus::StepLimit => "StepLimit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> State {
        *self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Drives a stepper on the controlled field, handing each accepted endpoint to
/// `observe`. `observe` may stop the run with a status of its choice.
pub(crate) fn drive<O>(
    p: &SystemParams,
    u0: State,
    settings: &IntegratorSettings,
    mut observe: O,
) -> Trajectory
where
    O: FnMut(f64, &State) -> ControlFlow<TrajectoryStatus>,
{
    let backward = settings.backward;
    let params = *p;
    let field = move |y: &[f64; 3]| {
        let f = vector_field(&params, &State::from_array(*y));
        if backward {
            [-f.x, -f.y, -f.z]
        } else {
            f.to_array()
        }
    };
    let mut times = vec![0.0];
    let mut states = vec![u0];
    if let ControlFlow::Break(status) = observe(0.0, &u0) {
        return Trajectory { times, states, status };
    }
    let mut stepper = Stepper::new(field, u0.to_array(), *settings);
    let status = loop {
        if stepper.t >= settings.t_max {
            break TrajectoryStatus::CompletedTspan;
        }
        if stepper.accepted >= settings.max_steps {
            break TrajectoryStatus::StepLimit;
        }
        let outcome = stepper.step(settings.t_max);
        let s = State::from_array(stepper.y);
        match outcome {
            Err(StepError::NonFinite) => {
                times.push(stepper.t);
                states.push(s);
                break TrajectoryStatus::Diverged;
            }
            Err(StepError::StepTooSmall) => break TrajectoryStatus::StepLimit,
            Ok(()) => {}
        }
        times.push(stepper.t);
        states.push(s);
        if s.norm() > settings.blowup_norm {
            break TrajectoryStatus::Diverged;
        }
        if let ControlFlow::Break(status) = observe(stepper.t, &s) {
            break status;
        }
    };
    Trajectory { times, states, status }
}

/// Numerical flow from `u0` over `[0, t_max]`.
pub fn integrate(p: &SystemParams, u0: State, settings: &IntegratorSettings) -> Result<Trajectory> {
    settings.validate()?;
    Ok(drive(p, u0, settings, |_, _| ControlFlow::Continue(())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOutcome {
    pub terminal: Option<Equilibrium>,
    pub final_distance: f64,
    pub trajectory: Trajectory,
}

/// Dwell-based capture of the state by one equilibrium of a set.
pub(crate) struct CaptureTracker<'a> {
    eqs: &'a EquilibriumSet,
    radius: f64,
    current: Option<State>,
    dwell: usize,
    pub last_distance: f64,
    /// The origin only counts once the state has been farther than this.
    origin_arm_radius: Option<f64>,
}

impl<'a> CaptureTracker<'a> {
    pub fn new(eqs: &'a EquilibriumSet, radius: f64) -> Self {
        Self {
            eqs,
            radius,
            current: None,
            dwell: 0,
            last_distance: f64::INFINITY,
            origin_arm_radius: None,
        }
    }

    pub fn arm_origin_after(mut self, radius: f64) -> Self {
        self.origin_arm_radius = Some(radius);
        self
    }

    /// Feeds one endpoint; returns the captured location once the dwell is met.
    pub fn observe(&mut self, s: &State) -> Option<State> {
        if let Some(r) = self.origin_arm_radius {
            if s.norm() > r {
                self.origin_arm_radius = None;
            }
        }
        let (loc, d) = self.eqs.nearest(s);
        self.last_distance = d;
        let origin_blocked = self.origin_arm_radius.is_some() && loc == State::ORIGIN;
        if d <= self.radius && !origin_blocked {
            let same = match self.current {
                Some(c) => c.distance(&loc) <= self.radius,
                None => false,
            };
            self.dwell = if same { self.dwell + 1 } else { 1 };
            self.current = Some(loc);
            if self.dwell >= CAPTURE_DWELL_CHECKS {
                return Some(loc);
            }
        } else {
            self.dwell = 0;
            self.current = None;
        }
        None
    }

    pub fn equilibrium(&self, p: &SystemParams, loc: State) -> Equilibrium {
        self.eqs
            .isolated()
            .into_iter()
            .find(|e| e.location == loc)
            .copied()
            .unwrap_or_else(|| Equilibrium::at(p, loc))
    }
}

pub(crate) fn run_capture(
    p: &SystemParams,
    u0: State,
    settings: &IntegratorSettings,
    mut tracker: CaptureTracker<'_>,
    mut extra: impl FnMut(&State),
) -> ConvergenceOutcome {
    let mut captured = None;
    let trajectory = drive(p, u0, settings, |t, s| {
        extra(s);
        if t == 0.0 && tracker.origin_arm_radius.is_none() {
            // a start exactly on an isolated equilibrium is its own orbit
            if let Some(e) = tracker.eqs.isolated().into_iter().find(|e| e.location == *s) {
                tracker.last_distance = 0.0;
                captured = Some(e.location);
                return ControlFlow::Break(TrajectoryStatus::CapturedEquilibrium);
            }
        }
        match tracker.observe(s) {
            Some(loc) => {
                captured = Some(loc);
                ControlFlow::Break(TrajectoryStatus::CapturedEquilibrium)
            }
            None => ControlFlow::Continue(()),
        }
    });
    let terminal = captured.map(|loc| tracker.equilibrium(p, loc));
    let final_distance = match terminal {
        Some(e) => trajectory.last_state().distance(&e.location),
        None => tracker.eqs.nearest(&trajectory.last_state()).1,
    };
    ConvergenceOutcome {
        terminal,
        final_distance,
        trajectory,
    }
}

/// Integrates until the state settles within `capture_radius` of one member
/// of `eqs` for [`CAPTURE_DWELL_CHECKS`] consecutive steps, or until the time,
/// step or blow-up limits end the run.
pub fn integrate_to_equilibrium(
    p: &SystemParams,
    u0: State,
    eqs: &EquilibriumSet,
    capture_radius: f64,
    settings: &IntegratorSettings,
) -> Result<ConvergenceOutcome> {
    settings.validate()?;
    if capture_radius.is_nan() || capture_radius <= 0.0 {
        return Err(Error::InvalidArgument("capture radius must be positive".into()));
    }
    Ok(run_capture(
        p,
        u0,
        settings,
        CaptureTracker::new(eqs, capture_radius),
        |_| {},
    ))
}

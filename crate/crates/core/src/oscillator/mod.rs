//! The conservative linear test system
//!
//! ```text
//! dx/dt = -a y,   dy/dt = b x,   (x, y)(0) = (1, 0)
//! ```
//!
//! with closed-form solution `x = cos(ωt)`, `y = sqrt(b/a) sin(ωt)`,
//! `ω = sqrt(ab)`, and quadratic invariant `b x² + a y²`.

mod hiprec;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpcore::{PrecisionConfig, SoftFloat};
use crate::scalar::Scalar;

use hiprec::Fixed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("coefficient {name} = {value} must be finite and positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("time {0} must be finite and nonnegative")]
    NegativeTime(f64),
}

/// Coefficients of the oscillator. The `f64` values are taken as exact;
/// each run rounds them to its own arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct OscillatorParams {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawParams {
    a: f64,
    b: f64,
}

impl TryFrom<RawParams> for OscillatorParams {
    type Error = ParamsError;

    fn try_from(raw: RawParams) -> Result<Self, ParamsError> {
        OscillatorParams::new(raw.a, raw.b)
    }
}

impl Default for OscillatorParams {
    /// `a = 0.1`, `b = 0.2`.
    fn default() -> Self {
        OscillatorParams { a: 0.1, b: 0.2 }
    }
}

impl OscillatorParams {
    pub fn new(a: f64, b: f64) -> Result<Self, ParamsError> {
        for (name, value) in [("a", a), ("b", b)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ParamsError::NonPositive { name, value });
            }
        }
        Ok(OscillatorParams { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Angular frequency `sqrt(ab)`.
    pub fn omega(&self) -> f64 {
        (self.a * self.b).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega()
    }

    /// Largest state norm along the analytic orbit, `max(1, sqrt(b/a))`.
    pub fn orbit_scale(&self) -> f64 {
        (self.b / self.a).sqrt().max(1.0)
    }

    /// `(a, b)` rounded into an arithmetic.
    pub fn coefficients<T: Scalar>(&self, ctx: T::Context) -> (T, T) {
        (T::from_f64_in(self.a, ctx), T::from_f64_in(self.b, ctx))
    }

    pub fn exact_a(&self) -> BigRational {
        BigRational::from_float(self.a).expect("validated finite")
    }

    pub fn exact_b(&self) -> BigRational {
        BigRational::from_float(self.b).expect("validated finite")
    }
}

/// Oscillator state at time `t`. The time stamp is bookkeeping only; it is
/// never part of the rounded arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    pub x: T,
    pub y: T,
    pub t: f64,
}

impl<T: Scalar> State<T> {
    pub fn new(x: T, y: T, t: f64) -> Self {
        State { x, y, t }
    }

    /// The fixed initial condition `(1, 0)` at `t = 0`.
    pub fn initial() -> Self {
        State { x: T::one(), y: T::zero(), t: 0.0 }
    }

    pub fn to_exact(&self) -> State<BigRational> {
        State { x: self.x.to_exact(), y: self.y.to_exact(), t: self.t }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// Right-hand side `(-a y, b x)` in the arithmetic of `T`.
pub fn rhs<T: Scalar>(params: &OscillatorParams, s: &State<T>, ctx: T::Context) -> (T, T) {
    let (a, b) = params.coefficients::<T>(ctx);
    rhs_with(&a, &b, s)
}

pub(crate) fn rhs_with<T: Scalar>(a: &T, b: &T, s: &State<T>) -> (T, T) {
    (-(a.clone()) * s.y.clone(), b.clone() * s.x.clone())
}

/// `b x² + a y²` in the arithmetic of `T`.
pub fn invariant_value<T: Scalar>(params: &OscillatorParams, s: &State<T>, ctx: T::Context) -> T {
    let (a, b) = params.coefficients::<T>(ctx);
    b * s.x.clone() * s.x.clone() + a * s.y.clone() * s.y.clone()
}

/// `b x² + a y²` evaluated exactly.
pub fn invariant_exact(a: &BigRational, b: &BigRational, x: &BigRational, y: &BigRational) -> BigRational {
    b * x * x + a * y * y
}

/// Closed-form solution at time `t`, rounded to 113 significand bits.
pub fn analytic_solution(params: &OscillatorParams, t: f64) -> Result<State<SoftFloat>, ParamsError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(ParamsError::NegativeTime(t));
    }
    let exact_t = BigRational::from_float(t).expect("finite");
    Ok(analytic_solution_exact(params, &exact_t, t))
}

/// Closed-form solution at the exact time `t` (reported as `t_label`).
///
/// Evaluated in 320-bit fixed point and then rounded once to 113 bits, so
/// the result is within one binary128 rounding of the true value.
pub fn analytic_solution_exact(params: &OscillatorParams, t: &BigRational, t_label: f64) -> State<SoftFloat> {
    let (x, y) = analytic_fixed(params, t);
    State {
        x: SoftFloat::from_rational(&x, PrecisionConfig::QUAD),
        y: SoftFloat::from_rational(&y, PrecisionConfig::QUAD),
        t: t_label,
    }
}

/// State after `step` steps of size `dt`, i.e. at the exact time `step * dt`.
pub fn analytic_at_step(params: &OscillatorParams, step: u64, dt: f64) -> State<SoftFloat> {
    let t = BigRational::from_float(dt).expect("finite step") * BigRational::from_integer(step.into());
    analytic_solution_exact(params, &t, step as f64 * dt)
}

fn analytic_fixed(params: &OscillatorParams, t: &BigRational) -> (BigRational, BigRational) {
    let a = params.exact_a();
    let b = params.exact_b();
    let omega = Fixed::from_rational(&(&a * &b)).sqrt();
    let amplitude = Fixed::from_rational(&(&b / &a)).sqrt();
    let theta = hiprec::scale(&omega, t);
    let (c, s) = hiprec::cos_sin(&theta);
    let y = hiprec::product(&amplitude, &s);
    (c.to_rational(), y.to_rational())
}

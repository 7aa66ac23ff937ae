//! Round-off versus truncation error laboratory.
//!
//! Integrates the conservative oscillator `x' = -a y`, `y' = b x` with
//! forward Euler, the implicit midpoint rule and a third-order Runge–Kutta
//! scheme in emulated binary arithmetic of any significand width from 2 to
//! 113 bits, then splits the total error against the closed-form solution
//! into a truncation part (same scheme and step at high precision) and a
//! round-off part (run minus reference).
//!
//! Integrators are generic over [`Scalar`], implemented for native `f32` and
//! `f64`, the emulated [`SoftFloat`] and exact [`BigRational`].

pub mod analysis;
pub mod cli;
pub mod experiments;
pub mod fpcore;
pub mod oscillator;
pub mod scalar;
pub mod schemes;

pub use fpcore::{PrecisionConfig, SoftFloat};
pub use num_rational::BigRational;
pub use oscillator::{OscillatorParams, State};
pub use scalar::Scalar;
pub use schemes::{Scheme, SamplingPlan, Trajectory, UpdateMatrix};

/// Exact rational arithmetic.
pub type Exact = BigRational;
/// Emulated arithmetic; the precision travels with each value.
pub type Emulated = SoftFloat;
/// Analysis results are reported at binary128 width.
pub type Wide = SoftFloat;

pub type ExactState = State<Exact>;
pub type EmulatedState = State<Emulated>;
pub type NativeState32 = State<f32>;
pub type NativeState64 = State<f64>;

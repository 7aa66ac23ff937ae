//! The arithmetic the integrators are generic over.
//!
//! A [`Scalar`] is a num-traits number plus a rounding context used to bring
//! `f64` constants (coefficients, step sizes) into its arithmetic. Native
//! `f32`/`f64`, the emulated [`SoftFloat`] and the exact [`BigRational`] all
//! implement it, so one scheme implementation serves hardware runs, emulated
//! reduced-precision runs and exact-arithmetic oracles.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::fpcore::{PrecisionConfig, SoftFloat};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Rounding context for constants.
    type Context: Copy + Debug + Send + Sync;

    /// `x` as represented in this arithmetic.
    fn from_f64_in(x: f64, ctx: Self::Context) -> Self;

    /// The exact value.
    fn to_exact(&self) -> BigRational;

    /// Nearest `f64`.
    fn to_f64(&self) -> f64;

    /// Short label for reports, e.g. `p24` or `exact`.
    fn context_label(ctx: Self::Context) -> String;
}

impl Scalar for f32 {
    type Context = ();

    fn from_f64_in(x: f64, _: ()) -> f32 {
        x as f32
    }

    fn to_exact(&self) -> BigRational {
        BigRational::from_float(*self).expect("finite value")
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn context_label(_: ()) -> String {
        "f32".into()
    }
}

impl Scalar for f64 {
    type Context = ();

    fn from_f64_in(x: f64, _: ()) -> f64 {
        x
    }

    fn to_exact(&self) -> BigRational {
        BigRational::from_float(*self).expect("finite value")
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn context_label(_: ()) -> String {
        "f64".into()
    }
}

impl Scalar for SoftFloat {
    type Context = PrecisionConfig;

    fn from_f64_in(x: f64, ctx: PrecisionConfig) -> SoftFloat {
        SoftFloat::from_f64(x, ctx)
    }

    fn to_exact(&self) -> BigRational {
        self.to_rational()
    }

    fn to_f64(&self) -> f64 {
        SoftFloat::to_f64(self)
    }

    fn context_label(ctx: PrecisionConfig) -> String {
        ctx.to_string()
    }
}

impl Scalar for BigRational {
    type Context = ();

    fn from_f64_in(x: f64, _: ()) -> BigRational {
        BigRational::from_float(x).expect("finite value")
    }

    fn to_exact(&self) -> BigRational {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn context_label(_: ()) -> String {
        "exact".into()
    }
}

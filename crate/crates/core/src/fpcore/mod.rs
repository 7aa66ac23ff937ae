//! Emulated binary floating point at a configurable significand width.
//!
//! Every operation computes the exact mathematical result (or enough of it,
//! plus a sticky bit) and rounds once to nearest, ties to even. The exponent
//! is unbounded, so there is no overflow, underflow or subnormal range.

mod decimal;
mod soft;
mod wide;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decimal::{format_sci, parse_decimal};
pub use soft::SoftFloat;

/// Narrowest supported significand.
pub const MIN_BITS: u32 = 2;
/// Widest supported significand (binary128).
pub const MAX_BITS: u32 = 113;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FpError {
    #[error("significand width {0} outside [{MIN_BITS}, {MAX_BITS}]")]
    InvalidPrecision(u32),
    #[error("non-finite input {0}")]
    NonFinite(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("cannot parse decimal number {0:?}")]
    Parse(String),
}

/// Emulated floating-point format: significand width in bits, including the
/// implicit leading bit. Rounding is always to nearest, ties to even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrecisionConfig {
    significand_bits: u32,
}

impl PrecisionConfig {
    pub const HALF: PrecisionConfig = PrecisionConfig { significand_bits: 11 };
    pub const SINGLE: PrecisionConfig = PrecisionConfig { significand_bits: 24 };
    pub const DOUBLE: PrecisionConfig = PrecisionConfig { significand_bits: 53 };
    pub const QUAD: PrecisionConfig = PrecisionConfig { significand_bits: 113 };

    pub fn new(significand_bits: u32) -> Result<Self, FpError> {
        if (MIN_BITS..=MAX_BITS).contains(&significand_bits) {
            Ok(PrecisionConfig { significand_bits })
        } else {
            Err(FpError::InvalidPrecision(significand_bits))
        }
    }

    pub fn bits(self) -> u32 {
        self.significand_bits
    }

    /// `2^-p` as an `f64`; exact for every supported width.
    pub fn unit_roundoff(self) -> f64 {
        unit_roundoff(self)
    }

    pub(crate) fn narrower(self, other: PrecisionConfig) -> PrecisionConfig {
        if self.significand_bits <= other.significand_bits {
            self
        } else {
            other
        }
    }
}

impl TryFrom<u32> for PrecisionConfig {
    type Error = FpError;

    fn try_from(bits: u32) -> Result<Self, FpError> {
        PrecisionConfig::new(bits)
    }
}

impl From<PrecisionConfig> for u32 {
    fn from(cfg: PrecisionConfig) -> u32 {
        cfg.significand_bits
    }
}

impl std::fmt::Display for PrecisionConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p{}", self.significand_bits)
    }
}

/// Unit roundoff `u = 2^-p`.
pub fn unit_roundoff(cfg: PrecisionConfig) -> f64 {
    (-(cfg.bits() as i32) as f64).exp2()
}

/// Unit roundoff as an exact rational.
pub fn unit_roundoff_exact(cfg: PrecisionConfig) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << cfg.bits() as usize)
}

/// Nearest representable value to the exact rational `x`, ties to even.
pub fn round_to(x: &BigRational, cfg: PrecisionConfig) -> SoftFloat {
    SoftFloat::from_rational(x, cfg)
}

/// Nearest representable value to the finite `f64` `x`.
pub fn round_f64(x: f64, cfg: PrecisionConfig) -> Result<SoftFloat, FpError> {
    SoftFloat::try_from_f64(x, cfg)
}

pub fn op_add(a: SoftFloat, b: SoftFloat, cfg: PrecisionConfig) -> SoftFloat {
    SoftFloat::add_at(a, b, cfg)
}

pub fn op_sub(a: SoftFloat, b: SoftFloat, cfg: PrecisionConfig) -> SoftFloat {
    SoftFloat::add_at(a, -b, cfg)
}

pub fn op_mul(a: SoftFloat, b: SoftFloat, cfg: PrecisionConfig) -> SoftFloat {
    SoftFloat::mul_at(a, b, cfg)
}

pub fn op_div(a: SoftFloat, b: SoftFloat, cfg: PrecisionConfig) -> Result<SoftFloat, FpError> {
    SoftFloat::div_at(a, b, cfg)
}

pub fn op_sqrt(a: SoftFloat, cfg: PrecisionConfig) -> Result<SoftFloat, FpError> {
    SoftFloat::sqrt_at(a, cfg)
}

/// Correctly rounded square root of a nonnegative exact rational.
pub fn sqrt_rational(x: &BigRational, cfg: PrecisionConfig) -> Result<SoftFloat, FpError> {
    SoftFloat::sqrt_rational(x, cfg)
}

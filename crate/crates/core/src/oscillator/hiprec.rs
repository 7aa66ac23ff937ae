//! Fixed-point transcendental evaluation with 320 fractional bits.
//!
//! Absolute error of every routine here is a small multiple of `2^-300`,
//! far below the `2^-113` rounding applied to the results.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) const FRAC_BITS: usize = 320;

/// A real number `v / 2^FRAC_BITS`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Fixed(pub(crate) BigInt);

impl Fixed {
    pub(crate) fn from_rational(x: &BigRational) -> Fixed {
        Fixed((x.numer() << FRAC_BITS).div_floor(x.denom()))
    }

    pub(crate) fn to_rational(&self) -> BigRational {
        BigRational::new(self.0.clone(), BigInt::one() << FRAC_BITS)
    }

    fn mul(&self, other: &Fixed) -> Fixed {
        Fixed((&self.0 * &other.0) >> FRAC_BITS)
    }

    fn mul_rational(&self, x: &BigRational) -> Fixed {
        Fixed((&self.0 * x.numer()).div_floor(x.denom()))
    }

    /// Square root of a nonnegative value.
    pub(crate) fn sqrt(&self) -> Fixed {
        let r = (self.0.magnitude() << FRAC_BITS).sqrt();
        Fixed(BigInt::from(r))
    }
}

/// `atan(1/m)` by its alternating series.
fn atan_inv(m: u32) -> BigInt {
    let one = BigInt::one() << FRAC_BITS;
    let m2 = BigInt::from(m) * BigInt::from(m);
    let mut power = one / BigInt::from(m);
    let mut sum = BigInt::zero();
    let mut k = 1u32;
    let mut add = true;
    while !power.is_zero() {
        let term = &power / BigInt::from(k);
        if add {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &m2;
        k += 2;
        add = !add;
    }
    sum
}

/// `pi` via Machin's formula.
pub(crate) fn pi() -> &'static Fixed {
    static PI: OnceLock<Fixed> = OnceLock::new();
    PI.get_or_init(|| Fixed(atan_inv(5) * 16 - atan_inv(239) * 4))
}

/// `(cos θ, sin θ)` for any real `θ`.
pub(crate) fn cos_sin(theta: &Fixed) -> (Fixed, Fixed) {
    let two_pi = &pi().0 << 1;
    // Reduce to [-pi, pi].
    let half = &two_pi >> 1;
    let turns = Integer::div_floor(&(&theta.0 + &half), &two_pi);
    let r = Fixed(&theta.0 - &turns * &two_pi);

    let one = BigInt::one() << FRAC_BITS;
    let mut cos = BigInt::zero();
    let mut sin = BigInt::zero();
    // term_k = r^k / k!, accumulated with alternating signs.
    let mut term = one;
    let mut k: u32 = 0;
    loop {
        match k % 4 {
            0 => cos += &term,
            1 => sin += &term,
            2 => cos -= &term,
            _ => sin -= &term,
        }
        k += 1;
        term = ((&term * &r.0) >> FRAC_BITS) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
    }
    (Fixed(cos), Fixed(sin))
}

/// Multiply a fixed-point value by an exact rational.
pub(crate) fn scale(x: &Fixed, by: &BigRational) -> Fixed {
    x.mul_rational(by)
}

/// Product of two fixed-point values.
pub(crate) fn product(x: &Fixed, y: &Fixed) -> Fixed {
    x.mul(y)
}

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::wide::{div_shifted, mul_u128, narrow_u256};
use super::{FpError, PrecisionConfig};

/// A binary floating-point value `(-1)^neg * mant * 2^exp` tagged with the
/// precision it was rounded to.
///
/// Nonzero values keep `mant` odd, so equal values have equal fields no
/// matter how they were produced. Zero is unsigned. Arithmetic operators
/// round to the narrower of the two operand precisions.
#[derive(Clone, Copy)]
pub struct SoftFloat {
    neg: bool,
    exp: i64,
    mant: u128,
    prec: PrecisionConfig,
}

fn bit_len(m: u128) -> u32 {
    128 - m.leading_zeros()
}

impl SoftFloat {
    pub fn zero(prec: PrecisionConfig) -> Self {
        SoftFloat { neg: false, exp: 0, mant: 0, prec }
    }

    pub fn one(prec: PrecisionConfig) -> Self {
        SoftFloat { neg: false, exp: 0, mant: 1, prec }
    }

    pub fn precision(&self) -> PrecisionConfig {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    /// Odd integer significand (zero for zero).
    pub fn significand(&self) -> u128 {
        self.mant
    }

    /// Binary exponent of the odd significand.
    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn abs(self) -> Self {
        SoftFloat { neg: false, ..self }
    }

    /// Exponent `e` with `2^e <= |x| < 2^(e+1)`; `None` for zero.
    pub fn magnitude_exponent(&self) -> Option<i64> {
        (self.mant != 0).then(|| self.exp + bit_len(self.mant) as i64 - 1)
    }

    /// Nonzero exact value `mant * 2^exp`, already normalized.
    fn exact(neg: bool, mant: u128, exp: i64, prec: PrecisionConfig) -> Self {
        if mant == 0 {
            return SoftFloat::zero(prec);
        }
        let tz = mant.trailing_zeros();
        SoftFloat { neg, exp: exp + tz as i64, mant: mant >> tz, prec }
    }

    /// Round `m * 2^exp` (plus a positive fraction below the last bit of
    /// `m` when `sticky` is set) to `prec`, ties to even.
    ///
    /// When `sticky` is set, `m` must carry at least `prec + 2` bits.
    fn round(neg: bool, m: u128, exp: i64, sticky: bool, prec: PrecisionConfig) -> Self {
        let bits = prec.bits();
        let len = bit_len(m);
        if len <= bits {
            debug_assert!(!sticky, "sticky result without guard bits");
            return SoftFloat::exact(neg, m, exp, prec);
        }
        let shift = len - bits;
        let mut q = m >> shift;
        let rem = m & ((1u128 << shift) - 1);
        let half = 1u128 << (shift - 1);
        let up = rem > half || (rem == half && (sticky || q & 1 == 1));
        if up {
            q += 1;
        }
        SoftFloat::exact(neg, q, exp + shift as i64, prec)
    }

    /// This value re-rounded to `prec` (identity when already representable).
    pub fn round_to(self, prec: PrecisionConfig) -> Self {
        let v = SoftFloat::round(self.neg, self.mant, self.exp, false, prec);
        SoftFloat { prec, ..v }
    }

    /// Exact conversion followed by one rounding.
    pub fn try_from_f64(x: f64, prec: PrecisionConfig) -> Result<Self, FpError> {
        if !x.is_finite() {
            return Err(FpError::NonFinite(x));
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as u128;
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u128 << 52), biased - 1075)
        };
        Ok(SoftFloat::round(neg, mant, exp, false, prec))
    }

    /// Like [`SoftFloat::try_from_f64`]; panics on non-finite input.
    pub fn from_f64(x: f64, prec: PrecisionConfig) -> Self {
        SoftFloat::try_from_f64(x, prec).expect("finite input")
    }

    pub fn from_f32(x: f32, prec: PrecisionConfig) -> Self {
        SoftFloat::from_f64(x as f64, prec)
    }

    /// Nearest `f64`, ties to even. Values outside the normal `f64` range
    /// saturate to infinity or lose bits through subnormal scaling.
    pub fn to_f64(&self) -> f64 {
        if self.mant == 0 {
            return 0.0;
        }
        let r = SoftFloat::round(self.neg, self.mant, self.exp, false, PrecisionConfig::DOUBLE);
        let len = bit_len(r.mant);
        let m53 = r.mant << (53 - len);
        let e = r.exp - (53 - len) as i64;
        let biased = e + 52 + 1023;
        let sign = if r.neg { -1.0 } else { 1.0 };
        if (1..2047).contains(&biased) {
            let bits = ((biased as u64) << 52) | ((m53 as u64) & ((1u64 << 52) - 1));
            sign * f64::from_bits(bits)
        } else {
            sign * (m53 as f64) * (e.clamp(-2000, 2000) as f64).exp2()
        }
    }

    /// Nearest `f32`, ties to even (normal range).
    pub fn to_f32(&self) -> f32 {
        self.round_to(PrecisionConfig::SINGLE).to_f64() as f32
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> BigRational {
        if self.mant == 0 {
            return BigRational::zero();
        }
        let sign = if self.neg { Sign::Minus } else { Sign::Plus };
        let m = BigInt::from_biguint(sign, BigUint::from(self.mant));
        if self.exp >= 0 {
            BigRational::from_integer(m << self.exp as usize)
        } else {
            BigRational::new_raw(m, BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Nearest representable value to an exact rational, ties to even.
    pub fn from_rational(x: &BigRational, prec: PrecisionConfig) -> Self {
        if x.is_zero() {
            return SoftFloat::zero(prec);
        }
        let neg = x.is_negative_rational();
        let n = x.numer().magnitude();
        let d = x.denom().magnitude();
        // Scale so the integer quotient carries prec + 2 or prec + 3 bits.
        let want = prec.bits() as i64 + 3;
        let k = want + d.bits() as i64 - n.bits() as i64;
        let (num, den) = if k >= 0 {
            (n << k as usize, d.clone())
        } else {
            (n.clone(), d << (-k) as usize)
        };
        let (q, r) = num.div_rem(&den);
        let q = q.to_u128().expect("quotient fits the carrier");
        SoftFloat::round(neg, q, -k, !r.is_zero(), prec)
    }

    pub(crate) fn add_at(a: SoftFloat, b: SoftFloat, prec: PrecisionConfig) -> Self {
        let a = if a.prec > prec { a.round_to(prec) } else { a };
        let b = if b.prec > prec { b.round_to(prec) } else { b };
        if a.mant == 0 {
            return SoftFloat { prec, ..b };
        }
        if b.mant == 0 {
            return SoftFloat { prec, ..a };
        }
        let top = |v: &SoftFloat| v.exp + bit_len(v.mant) as i64;
        let (a, b) = if top(&a) >= top(&b) { (a, b) } else { (b, a) };

        // Left-justify the larger operand at 126 bits; two bits of headroom
        // absorb the carry.
        let sa = 126 - bit_len(a.mant);
        let big = a.mant << sa;
        let base = a.exp - sa as i64;
        let d = b.exp - base;
        let small = if d >= 0 {
            b.mant << d
        } else {
            let r = (-d) as u64;
            if r >= 128 {
                1
            } else {
                let lost = b.mant & ((1u128 << r) - 1) != 0;
                (b.mant >> r) | lost as u128
            }
        };

        let (neg, sum) = if a.neg == b.neg {
            (a.neg, big + small)
        } else if big >= small {
            (a.neg, big - small)
        } else {
            (b.neg, small - big)
        };
        if sum == 0 {
            return SoftFloat::zero(prec);
        }
        SoftFloat::round(neg, sum, base, false, prec)
    }

    pub(crate) fn mul_at(a: SoftFloat, b: SoftFloat, prec: PrecisionConfig) -> Self {
        let a = if a.prec > prec { a.round_to(prec) } else { a };
        let b = if b.prec > prec { b.round_to(prec) } else { b };
        if a.mant == 0 || b.mant == 0 {
            return SoftFloat::zero(prec);
        }
        let neg = a.neg != b.neg;
        let exp = a.exp + b.exp;
        if a.mant >> 64 == 0 && b.mant >> 64 == 0 {
            return SoftFloat::round(neg, a.mant * b.mant, exp, false, prec);
        }
        let (hi, lo) = mul_u128(a.mant, b.mant);
        let (m, shift, lost) = narrow_u256(hi, lo);
        SoftFloat::round(neg, m, exp + shift as i64, lost, prec)
    }

    pub(crate) fn div_at(a: SoftFloat, b: SoftFloat, prec: PrecisionConfig) -> Result<Self, FpError> {
        let a = if a.prec > prec { a.round_to(prec) } else { a };
        let b = if b.prec > prec { b.round_to(prec) } else { b };
        if b.mant == 0 {
            return Err(FpError::DivisionByZero);
        }
        if a.mant == 0 {
            return Ok(SoftFloat::zero(prec));
        }
        let la = bit_len(a.mant) as i64;
        let lb = bit_len(b.mant) as i64;
        let shift = (prec.bits() as i64 + 3 + lb - la).max(0) as u32;
        let (q, inexact) = div_shifted(a.mant, b.mant, shift);
        Ok(SoftFloat::round(a.neg != b.neg, q, a.exp - b.exp - shift as i64, inexact, prec))
    }

    pub(crate) fn sqrt_at(a: SoftFloat, prec: PrecisionConfig) -> Result<Self, FpError> {
        let a = if a.prec > prec { a.round_to(prec) } else { a };
        if a.mant == 0 {
            return Ok(SoftFloat::zero(prec));
        }
        if a.neg {
            return Err(FpError::NegativeSqrt);
        }
        // Root of mant * 2^k with k of the parity of exp and at least
        // 2 * (prec + 3) bits in the radicand.
        let want = 2 * (prec.bits() as i64 + 3);
        let mut k = (want - bit_len(a.mant) as i64).max(0);
        if (a.exp - k) % 2 != 0 {
            k += 1;
        }
        let radicand = BigUint::from(a.mant) << k as usize;
        let root = radicand.sqrt();
        let inexact = &root * &root != radicand;
        let root = root.to_u128().expect("root fits the carrier");
        Ok(SoftFloat::round(false, root, (a.exp - k) / 2, inexact, prec))
    }

    /// Correctly rounded square root of a nonnegative rational.
    pub fn sqrt_rational(x: &BigRational, prec: PrecisionConfig) -> Result<Self, FpError> {
        if x.is_zero() {
            return Ok(SoftFloat::zero(prec));
        }
        if x.is_negative_rational() {
            return Err(FpError::NegativeSqrt);
        }
        let n = x.numer().magnitude();
        let d = x.denom().magnitude();
        // floor(n * 4^j / d) with enough bits for a prec + 3 bit root.
        let want = 2 * (prec.bits() as i64 + 3);
        let j = Integer::div_floor(&(want + d.bits() as i64 - n.bits() as i64), &2) + 1;
        let (q, r) = if j >= 0 {
            (n << (2 * j) as usize).div_rem(d)
        } else {
            n.div_rem(&(d << (-2 * j) as usize))
        };
        let root = q.sqrt();
        let inexact = !r.is_zero() || &root * &root != q;
        let root = root.to_u128().expect("root fits the carrier");
        Ok(SoftFloat::round(false, root, -j, inexact, prec))
    }

    /// Square root at this value's own precision.
    pub fn sqrt(self) -> Result<Self, FpError> {
        SoftFloat::sqrt_at(self, self.prec)
    }

    fn cmp_value(&self, other: &SoftFloat) -> Ordering {
        let sign = |v: &SoftFloat| -> i8 {
            if v.mant == 0 {
                0
            } else if v.neg {
                -1
            } else {
                1
            }
        };
        let (sa, sb) = (sign(self), sign(other));
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        let ta = self.exp + bit_len(self.mant) as i64;
        let tb = other.exp + bit_len(other.mant) as i64;
        let mag = ta.cmp(&tb).then_with(|| {
            let ja = self.mant << self.mant.leading_zeros();
            let jb = other.mant << other.mant.leading_zeros();
            ja.cmp(&jb)
        });
        if sa < 0 {
            mag.reverse()
        } else {
            mag
        }
    }
}

trait NegativeRational {
    fn is_negative_rational(&self) -> bool;
}

impl NegativeRational for BigRational {
    fn is_negative_rational(&self) -> bool {
        (self.numer().sign() == Sign::Minus) != (self.denom().sign() == Sign::Minus)
    }
}

impl PartialEq for SoftFloat {
    /// Value equality; the precision tag is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.neg == other.neg && self.exp == other.exp && self.mant == other.mant
    }
}

impl Eq for SoftFloat {}

impl PartialOrd for SoftFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SoftFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl std::hash::Hash for SoftFloat {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.neg, self.exp, self.mant).hash(state);
    }
}

impl std::fmt::Debug for SoftFloat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}[{}]", super::format_sci(&self.to_rational(), 36), self.prec)
    }
}

impl std::fmt::Display for SoftFloat {
    /// Enough significant decimal digits to identify the value at its precision.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let digits = (self.prec.bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        let digits = f.precision().map(|p| p + 1).unwrap_or(digits);
        f.write_str(&super::format_sci(&self.to_rational(), digits))
    }
}

impl Neg for SoftFloat {
    type Output = SoftFloat;

    fn neg(self) -> SoftFloat {
        if self.mant == 0 {
            self
        } else {
            SoftFloat { neg: !self.neg, ..self }
        }
    }
}

impl Add for SoftFloat {
    type Output = SoftFloat;

    fn add(self, rhs: SoftFloat) -> SoftFloat {
        SoftFloat::add_at(self, rhs, self.prec.narrower(rhs.prec))
    }
}

impl Sub for SoftFloat {
    type Output = SoftFloat;

    fn sub(self, rhs: SoftFloat) -> SoftFloat {
        SoftFloat::add_at(self, -rhs, self.prec.narrower(rhs.prec))
    }
}

impl Mul for SoftFloat {
    type Output = SoftFloat;

    fn mul(self, rhs: SoftFloat) -> SoftFloat {
        SoftFloat::mul_at(self, rhs, self.prec.narrower(rhs.prec))
    }
}

impl Div for SoftFloat {
    type Output = SoftFloat;

    /// Panics on division by zero; use [`super::op_div`] for a `Result`.
    fn div(self, rhs: SoftFloat) -> SoftFloat {
        SoftFloat::div_at(self, rhs, self.prec.narrower(rhs.prec)).expect("division by zero")
    }
}

impl Zero for SoftFloat {
    /// Zero tagged at the widest precision, so it never narrows a result.
    fn zero() -> Self {
        SoftFloat::zero(PrecisionConfig::QUAD)
    }

    fn is_zero(&self) -> bool {
        self.mant == 0
    }
}

impl One for SoftFloat {
    fn one() -> Self {
        SoftFloat::one(PrecisionConfig::QUAD)
    }
}

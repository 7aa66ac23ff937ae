//! Locale-free decimal formatting and exact parsing of rationals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::FpError;

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u8), e as usize)
}

fn scale10(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        x * BigRational::from_integer(pow10(e as u32))
    } else {
        x / BigRational::from_integer(pow10((-e) as u32))
    }
}

/// Round `x` to an integer, ties to even.
fn round_half_even(x: &BigRational) -> BigInt {
    let floor = x.floor().to_integer();
    let frac = x - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
    if frac > half || (frac == half && floor.is_odd()) {
        floor + 1
    } else {
        floor
    }
}

/// Scientific notation with `digits` significant digits, rounded half to
/// even, e.g. `1.2500000000000000000e-3`. Zero prints as `0e0`.
pub fn format_sci(x: &BigRational, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_zero() {
        return "0e0".to_string();
    }
    let mag = x.abs();
    // log10 estimate from bit lengths, corrected below.
    let bits = mag.numer().bits() as i64 - mag.denom().bits() as i64;
    let mut e10 = ((bits as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let lower = pow10(digits as u32 - 1);
    let upper = pow10(digits as u32);
    let mut d;
    loop {
        d = round_half_even(&scale10(&mag, digits as i64 - 1 - e10));
        if d >= upper {
            e10 += 1;
        } else if d < lower {
            e10 -= 1;
        } else {
            break;
        }
    }
    let s = d.to_string();
    let mut out = String::with_capacity(s.len() + 8);
    if x.is_negative() {
        out.push('-');
    }
    out.push_str(&s[..1]);
    if s.len() > 1 {
        out.push('.');
        out.push_str(&s[1..]);
    }
    out.push('e');
    out.push_str(&e10.to_string());
    out
}

/// Parse a decimal literal (`-1.25e-3`, `0.1`, `7`) into its exact value.
pub fn parse_decimal(s: &str) -> Result<BigRational, FpError> {
    let err = || FpError::Parse(s.to_string());
    let t = s.trim();
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let m = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(err)?;
    let m = if neg { BigInt::from_biguint(Sign::Minus, m.magnitude().clone()) } else { m };
    let value = scale10(&BigRational::from_integer(m), exponent - frac_part.len() as i64);
    Ok(value)
}

//! Fixed-width integer helpers for the soft-float carrier.

/// Full 256-bit product of two `u128` values as `(hi, lo)`.
pub(crate) fn mul_u128(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);

    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;

    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Shift a 256-bit value right so that it fits in 127 bits, returning the
/// truncated value, the shift applied and whether any nonzero bit was lost.
pub(crate) fn narrow_u256(hi: u128, lo: u128) -> (u128, u32, bool) {
    if hi == 0 {
        return (lo, 0, false);
    }
    let len = 256 - hi.leading_zeros();
    let shift = len - 127;
    let lost = lo & ((1u128 << shift) - 1) != 0;
    let value = (lo >> shift) | (hi << (128 - shift));
    (value, shift, lost)
}

/// `floor(num * 2^shift / den)` and whether the remainder is nonzero.
///
/// Requires `num < 2^127`, `den < 2^127`, and a quotient below `2^127`.
pub(crate) fn div_shifted(num: u128, den: u128, shift: u32) -> (u128, bool) {
    debug_assert!(den != 0);
    let num_len = 128 - num.leading_zeros();
    if num_len + shift <= 127 {
        let n = num << shift;
        return (n / den, !n.is_multiple_of(den));
    }
    let mut q = num / den;
    let mut r = num % den;
    for _ in 0..shift {
        r <<= 1;
        q <<= 1;
        if r >= den {
            r -= den;
            q |= 1;
        }
    }
    (q, r != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn mul_matches_bigint() {
        let cases = [
            (u128::MAX, u128::MAX),
            (1u128 << 112, (1u128 << 113) - 1),
            (0x1234_5678_9abc_def0_1122_3344_5566_7788, 0xfedc_ba98_7654_3210_0f0f_0f0f_0f0f_0f0f),
            (0, 17),
        ];
        for (a, b) in cases {
            let (hi, lo) = mul_u128(a, b);
            let got = (BigUint::from(hi) << 128usize) + BigUint::from(lo);
            assert_eq!(got, BigUint::from(a) * BigUint::from(b));
        }
    }

    #[test]
    fn long_division_matches_bigint() {
        let num = (1u128 << 112) + 12345;
        let den = (1u128 << 110) + 3;
        let (q, inexact) = div_shifted(num, den, 115);
        let n = BigUint::from(num) << 115usize;
        let d = BigUint::from(den);
        assert_eq!(BigUint::from(q), &n / &d);
        assert_eq!(inexact, (&n % &d) != BigUint::from(0u8));
    }

    #[test]
    fn narrow_keeps_sticky() {
        let (v, s, lost) = narrow_u256(1, 1);
        assert_eq!(s, 2);
        assert_eq!(v, 1u128 << 126);
        assert!(lost);
    }
}

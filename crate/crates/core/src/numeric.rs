//! Small exact-arithmetic helpers shared by the other modules.
//!
//! Conversions from exact rationals to `f64` come in directed flavours so that every
//! floating value reported by the crate is an outward-rounded interval endpoint.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `2^k` as a big integer.
pub fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// The dyadic rational `m / 2^k`.
pub fn dyadic(m: BigInt, k: usize) -> BigRational {
    BigRational::new(m, pow2(k))
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Nearest-ish `f64`; handles magnitudes beyond the `f64` exponent range by saturating.
pub fn to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.to_f64().unwrap_or_else(|| {
        let l = log2_abs(x);
        let mag = if l > 0.0 { f64::INFINITY } else { 0.0 };
        if x.is_negative() {
            -mag
        } else {
            mag
        }
    })
}

/// Largest `f64` that is `<= x`.
pub fn to_f64_down(x: &BigRational) -> f64 {
    let mut f = to_f64(x);
    while f.is_finite() && exact(f).map_or(false, |fr| &fr > x) {
        f = f.next_down();
    }
    f
}

/// Smallest `f64` that is `>= x`.
pub fn to_f64_up(x: &BigRational) -> f64 {
    let mut f = to_f64(x);
    while f.is_finite() && exact(f).map_or(false, |fr| &fr < x) {
        f = f.next_up();
    }
    f
}

fn exact(f: f64) -> Option<BigRational> {
    BigRational::from_float(f)
}

/// `log2 |x|` for nonzero `x`, valid far outside the `f64` exponent range.
pub fn log2_abs(x: &BigRational) -> f64 {
    assert!(!x.is_zero(), "log2 of zero");
    let n = x.numer().abs();
    let d = x.denom().abs();
    let e = n.bits() as i64 - d.bits() as i64;
    let scaled = if e >= 0 {
        BigRational::new(n, d << (e as usize))
    } else {
        BigRational::new(n << ((-e) as usize), d)
    };
    // scaled lies in (1/2, 2)
    scaled.to_f64().expect("scaled ratio is representable").log2() + e as f64
}

/// Pads an interval by a few units in the last place on each side, covering the
/// rounding of one libm call.
pub fn widen(lo: f64, hi: f64) -> (f64, f64) {
    (lo.next_down().next_down(), hi.next_up().next_up())
}

/// Outward enclosure of `ln(x)` for `x` in `[lo, hi]`, `0 < lo <= hi`.
pub fn ln_interval(lo: &BigRational, hi: &BigRational) -> (f64, f64) {
    debug_assert!(lo.is_positive() && lo <= hi);
    let (a, b) = (to_f64_down(lo), to_f64_up(hi));
    widen(a.ln(), b.ln())
}

/// Outward enclosure of `ln(1 + x)` for `x` in `[lo, hi]`, `-1 < lo <= hi`.
pub fn ln1p_interval(lo: &BigRational, hi: &BigRational) -> (f64, f64) {
    let (a, b) = (to_f64_down(lo), to_f64_up(hi));
    widen(a.ln_1p(), b.ln_1p())
}

pub fn sign(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// `ceil(-log2 tol)`, the number of binary digits needed for a width below `tol`.
pub fn bits_for_tolerance(tol: f64) -> usize {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    let b = (-tol.log2()).ceil();
    if b < 1.0 {
        1
    } else {
        b as usize + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_conversions_bracket_one_third() {
        let x = rational(1, 3);
        let (lo, hi) = (to_f64_down(&x), to_f64_up(&x));
        assert!(lo < hi);
        assert!(exact(lo).unwrap() < x && x < exact(hi).unwrap());
    }

    #[test]
    fn exact_values_are_not_widened() {
        let x = rational(3, 8);
        assert_eq!(to_f64_down(&x), 0.375);
        assert_eq!(to_f64_up(&x), 0.375);
    }

    #[test]
    fn log2_of_tiny_rational() {
        let x = dyadic(BigInt::from(3), 2000);
        let l = log2_abs(&x);
        assert!((l - (3f64.log2() - 2000.0)).abs() < 1e-9);
    }

    #[test]
    fn tolerance_bits() {
        assert!(2f64.powi(-(bits_for_tolerance(1e-12) as i32)) <= 1e-12);
        assert_eq!(bits_for_tolerance(0.5), 2);
    }
}

//! Exact angles in `[0, 1]` with eventually periodic binary expansions.
//!
//! A [`BinaryAngle`] keeps both views of the same number: the exact rational value and the
//! normalized digit expansion `.pre(period)`. Normalization means the period block is
//! primitive and the preperiod is as short as possible. Every nonzero dyadic rational is
//! stored with its expansion ending in repeating `1`s, so angles in `(0, 1/2]` always start
//! with the digit `0` (for instance `1/2 = .0(1)`), and `0 = .(0)`.
//!
//! Textual forms accepted by [`str::parse`]: `p/q`, `.b1b2…(per)` and the integers `0`, `1`.
//! Decimal notation is rejected. [`Display`](fmt::Display) writes the binary form and
//! round-trips through parsing.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::pow2;

/// An exact angle with its normalized binary expansion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryAngle {
    preperiod: Vec<u8>,
    period: Vec<u8>,
    value: BigRational,
}

impl BinaryAngle {
    pub fn zero() -> Self {
        BinaryAngle {
            preperiod: Vec::new(),
            period: vec![0],
            value: BigRational::zero(),
        }
    }

    pub fn half() -> Self {
        BinaryAngle {
            preperiod: vec![0],
            period: vec![1],
            value: BigRational::new(BigInt::one(), BigInt::from(2)),
        }
    }

    /// Builds the angle `numerator / denominator`, reducing the fraction first.
    pub fn from_fraction(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Result<Self> {
        let d: BigInt = denominator.into();
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Self::from_ratio(BigRational::new(numerator.into(), d))
    }

    /// Builds the angle with the given exact value; the expansion is obtained by base-2
    /// long division.
    pub fn from_ratio(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::out_of_range(&value, "[0, 1]"));
        }
        if value.is_zero() {
            return Ok(Self::zero());
        }
        let numer = value.numer().clone();
        let denom = value.denom().clone();
        let a = denom.trailing_zeros().unwrap_or(0) as usize;
        let odd = &denom >> a;
        if odd.is_one() {
            // nonzero dyadic: p / 2^a = .bits(p - 1)(1)
            let pre = bits_of(&(numer - 1u32), a);
            return Ok(BinaryAngle {
                preperiod: pre,
                period: vec![1],
                value,
            });
        }
        let (whole, rem) = numer.div_rem(&odd);
        let pre = bits_of(&whole, a);
        let len = multiplicative_order_of_two(&odd);
        let block = rem * (pow2(len) - 1u32) / &odd;
        let period = bits_of(&block, len);
        Ok(BinaryAngle {
            preperiod: pre,
            period,
            value,
        })
    }

    /// Builds the angle `.pre(period)`. An empty period means a terminating expansion.
    /// The result is normalized, so e.g. `.1(0)` and `.0(1)` both give `1/2 = .0(1)`.
    pub fn from_digits(pre: &[u8], period: &[u8]) -> Result<Self> {
        if let Some(&d) = pre.iter().chain(period).find(|&&d| d > 1) {
            return Err(Error::Parse(format!("invalid binary digit {d}")));
        }
        let a = pre.len();
        let head = int_of(pre);
        let value = if period.is_empty() {
            BigRational::new(head, pow2(a))
        } else {
            let l = period.len();
            let m = pow2(l) - 1u32;
            BigRational::new(head * &m + int_of(period), pow2(a) * m)
        };
        Self::from_ratio(value)
    }

    /// The purely periodic angle `.(block)`.
    pub fn periodic(block: &[u8]) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::Parse("empty period block".into()));
        }
        Self::from_digits(&[], block)
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    /// True for the dyadic rationals other than 0 (stored with a repeating `1`).
    pub fn is_dyadic(&self) -> bool {
        !self.value.is_zero() && self.value.denom().trailing_zeros() == Some(self.value.denom().bits() - 1)
    }

    /// Length of the stored expansion, `|pre| + |period|`.
    pub fn expansion_len(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }

    /// Binary digit number `k` (1-based) of the stored expansion.
    pub fn digit(&self, k: usize) -> u8 {
        assert!(k >= 1, "digits are indexed from 1");
        let i = k - 1;
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// The infinite digit sequence `b1 b2 b3 …`.
    pub fn digits(&self) -> impl Iterator<Item = u8> + '_ {
        self.preperiod
            .iter()
            .copied()
            .chain(self.period.iter().copied().cycle())
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        self.digits().take(n).collect()
    }

    /// `1 - x`.
    pub fn complement(&self) -> Self {
        Self::from_ratio(BigRational::one() - &self.value).expect("1 - x stays in [0, 1]")
    }

    /// The doubling map `x ↦ 2x mod 1`, with values in `[0, 1)`.
    ///
    /// Away from dyadic rationals this is the left shift of the digits. A dyadic angle
    /// `.b(1)` with a one-digit preperiod shifts to `.(1) = 1 ≡ 0`, and the result is `0`.
    pub fn double(&self) -> Self {
        let first = self.digit(1);
        let mut value = &self.value * BigInt::from(2) - BigInt::from(first);
        if value.is_one() {
            value = BigRational::zero();
        }
        if value.is_zero() {
            return Self::zero();
        }
        let (preperiod, period) = if self.preperiod.is_empty() {
            let mut p = self.period.clone();
            p.rotate_left(1);
            (Vec::new(), p)
        } else {
            (self.preperiod[1..].to_vec(), self.period.clone())
        };
        BinaryAngle {
            preperiod,
            period,
            value,
        }
    }

    /// The forward orbit `x, D(x), D²(x), …` up to (excluding) the first repetition: the
    /// preperiodic part followed by one full cycle.
    pub fn orbit(&self) -> Vec<Self> {
        let mut out: Vec<Self> = vec![self.clone()];
        loop {
            let next = out.last().expect("orbit is nonempty").double();
            if out.iter().any(|p| p.value == next.value) {
                return out;
            }
            out.push(next);
        }
    }

    /// Exact fraction form `p/q`.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.value.numer(), self.value.denom())
    }
}

impl PartialOrd for BinaryAngle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BinaryAngle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for BinaryAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(".")?;
        for d in &self.preperiod {
            write!(f, "{d}")?;
        }
        f.write_str("(")?;
        for d in &self.period {
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for BinaryAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty angle".into()));
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return Self::from_fraction(n, d);
        }
        if let Some(body) = s.strip_prefix('.') {
            let (pre, per) = match body.split_once('(') {
                Some((pre, rest)) => {
                    let per = rest
                        .strip_suffix(')')
                        .ok_or_else(|| Error::Parse(format!("unclosed period in {s:?}")))?;
                    if per.is_empty() {
                        return Err(Error::Parse(format!("empty period in {s:?}")));
                    }
                    (pre, per)
                }
                None => (body, ""),
            };
            let pre = parse_bits(pre)?;
            let per = parse_bits(per)?;
            return Self::from_digits(&pre, &per);
        }
        if s.contains('.') {
            return Err(Error::Parse(format!(
                "decimal notation is not supported ({s:?}); use p/q or .bits(period)"
            )));
        }
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::Parse(format!("unrecognized angle {s:?}")))?;
        Self::from_fraction(n, 1)
    }
}

impl Serialize for BinaryAngle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for BinaryAngle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Parse(format!("invalid binary digit {other:?}"))),
        })
        .collect()
}

/// `width` binary digits of `n`, most significant first.
fn bits_of(n: &BigInt, width: usize) -> Vec<u8> {
    let n: BigUint = n.to_biguint().expect("digit blocks are nonnegative");
    (0..width)
        .rev()
        .map(|i| u8::from(n.bit(i as u64)))
        .collect()
}

fn int_of(bits: &[u8]) -> BigInt {
    bits.iter()
        .fold(BigInt::zero(), |acc, &b| (acc << 1usize) + BigInt::from(b))
}

/// Smallest `l >= 1` with `2^l ≡ 1 (mod q)`, for odd `q > 1`.
fn multiplicative_order_of_two(q: &BigInt) -> usize {
    let two = BigInt::from(2);
    let mut x = &two % q;
    let mut l = 1;
    while !x.is_one() {
        x = (x * &two) % q;
        l += 1;
    }
    l
}

/// Index (1-based) of the first binary digit where the stored expansions differ.
pub fn agreement_depth(x: &BinaryAngle, y: &BinaryAngle) -> Result<usize> {
    if x == y {
        return Err(Error::EqualAngles);
    }
    let limit = x.preperiod.len().max(y.preperiod.len()) + x.period.len().lcm(&y.period.len()) + 1;
    let depth = (1..=limit)
        .find(|&k| x.digit(k) != y.digit(k))
        .expect("distinct normalized expansions differ within the combined period");
    Ok(depth)
}

/// Outcome of the two-sided distance estimate `c 2^{-n} ≤ |x - y| ≤ 2^{-n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceBounds {
    /// First differing digit.
    pub depth: usize,
    pub c: BigRational,
    pub lower: BigRational,
    pub upper: BigRational,
    pub distance: BigRational,
    pub holds: bool,
}

/// Checks the distance bounds for a pair `0 < y < x <= 1/2`. The bounds are only
/// guaranteed for real kneading angles; membership is the caller's business.
pub fn distance_bounds_check(x: &BinaryAngle, y: &BinaryAngle) -> Result<DistanceBounds> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !(y.value.is_positive() && y.value < x.value && x.value <= half) {
        return Err(Error::Ordering(format!("need 0 < {} < {} <= 1/2", y.to_fraction_string(), x.to_fraction_string())));
    }
    let depth = agreement_depth(x, y)?;
    let c = if x.value == half {
        BigRational::one()
    } else {
        (BigRational::one() - &x.value * BigInt::from(2)) * BigInt::from(2)
    };
    let scale = BigRational::new(BigInt::one(), pow2(depth));
    let lower = &c * &scale;
    let upper = scale * BigInt::from(2);
    let distance = &x.value - &y.value;
    let holds = lower <= distance && distance <= upper;
    Ok(DistanceBounds {
        depth,
        c,
        lower,
        upper,
        distance,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;

    fn a(s: &str) -> BinaryAngle {
        s.parse().unwrap()
    }

    #[test]
    fn expansions_of_small_fractions() {
        let third = BinaryAngle::from_fraction(1, 3).unwrap();
        assert!(third.preperiod().is_empty());
        assert_eq!(third.period(), &[0, 1]);

        let half = BinaryAngle::from_fraction(1, 2).unwrap();
        assert_eq!(half.preperiod(), &[0]);
        assert_eq!(half.period(), &[1]);
        assert_eq!(half, BinaryAngle::half());

        let three_sevenths = BinaryAngle::from_fraction(3, 7).unwrap();
        assert!(three_sevenths.preperiod().is_empty());
        assert_eq!(three_sevenths.period(), &[0, 1, 1]);
    }

    #[test]
    fn reducible_fractions_normalize() {
        assert_eq!(a("6/14"), a("3/7"));
        assert_eq!(a("0/5"), BinaryAngle::zero());
        assert_eq!(a("1"), a(".(1)"));
    }

    #[test]
    fn fraction_errors() {
        assert_eq!(BinaryAngle::from_fraction(1, 0), Err(Error::ZeroDenominator));
        assert!(matches!(BinaryAngle::from_fraction(3, 2), Err(Error::OutOfRange { .. })));
        assert!(matches!(BinaryAngle::from_fraction(-1, 2), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn parse_binary_forms() {
        assert_eq!(a(".(01)"), a("1/3"));
        assert_eq!(a(".0(1)"), a("1/2"));
        assert_eq!(a(".1"), a("1/2"));
        assert_eq!(a(".1(0)"), a("1/2"));
        assert_eq!(a(".011(100)"), a("25/56"));
        assert_eq!(a(".(0110)"), a("2/5"));
    }

    #[test]
    fn parse_rejects_decimals_and_garbage() {
        assert!(matches!("0.5".parse::<BinaryAngle>(), Err(Error::Parse(_))));
        assert!(matches!(".(012)".parse::<BinaryAngle>(), Err(Error::Parse(_))));
        assert!(matches!(".(01".parse::<BinaryAngle>(), Err(Error::Parse(_))));
        assert!(matches!(".0()".parse::<BinaryAngle>(), Err(Error::Parse(_))));
        assert!(matches!("x/3".parse::<BinaryAngle>(), Err(Error::Parse(_))));
        assert!(matches!("".parse::<BinaryAngle>(), Err(Error::Parse(_))));
    }

    #[test]
    fn display_is_the_binary_grammar() {
        assert_eq!(a("1/3").to_string(), ".(01)");
        assert_eq!(a("1/2").to_string(), ".0(1)");
        assert_eq!(a("0").to_string(), ".(0)");
        assert_eq!(a("5/12").to_string(), ".01(10)");
        assert_eq!(a("5/12").to_fraction_string(), "5/12");
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(a("1/3").double(), a("2/3"));
        assert_eq!(a("3/7").double(), a("6/7"));
        assert_eq!(a("1/2").double(), BinaryAngle::zero());
        assert_eq!(a("1").double(), BinaryAngle::zero());
        assert_eq!(a("3/4").double(), a("1/2"));
    }

    #[test]
    fn orbit_examples() {
        let values = |s: &str| -> Vec<BigRational> { a(s).orbit().into_iter().map(|x| x.value).collect() };
        assert_eq!(values("3/7"), vec![rational(3, 7), rational(6, 7), rational(5, 7)]);
        assert_eq!(values("2/5"), vec![rational(2, 5), rational(4, 5), rational(3, 5), rational(1, 5)]);
        assert_eq!(values("0"), vec![rational(0, 1)]);
        assert_eq!(values("1/4"), vec![rational(1, 4), rational(1, 2), rational(0, 1)]);
    }

    #[test]
    fn agreement_depth_examples() {
        assert_eq!(agreement_depth(&a("3/7"), &a("2/5")), Ok(5));
        assert_eq!(agreement_depth(&a("1/2"), &a("1/3")), Ok(3));
        assert_eq!(agreement_depth(&a("3/7"), &a("3/7")), Err(Error::EqualAngles));
    }

    #[test]
    fn agreement_depth_with_flipped_digit() {
        let theta = a("3/7");
        for k in 1..12 {
            let mut pre = theta.prefix(k + 6);
            pre[k - 1] ^= 1;
            let flipped = BinaryAngle::from_digits(&pre[..k], theta_tail(&theta, k).as_slice()).unwrap();
            assert_eq!(agreement_depth(&theta, &flipped).unwrap(), k, "k = {k}");
        }
    }

    // the period of 3/7 rotated to continue after digit k, so the flip is the only change
    fn theta_tail(theta: &BinaryAngle, k: usize) -> Vec<u8> {
        (0..theta.period().len()).map(|i| theta.digit(k + 1 + i)).collect()
    }

    #[test]
    fn distance_examples() {
        let d = distance_bounds_check(&a("3/7"), &a("2/5")).unwrap();
        assert_eq!(d.depth, 5);
        assert_eq!(d.lower, rational(1, 112));
        assert_eq!(d.upper, rational(1, 16));
        assert_eq!(d.distance, rational(1, 35));
        assert!(d.holds);

        let d = distance_bounds_check(&a("1/2"), &a("1/3")).unwrap();
        assert_eq!((d.lower.clone(), d.upper.clone()), (rational(1, 8), rational(1, 4)));
        assert!(d.holds);

        let d = distance_bounds_check(&a("1/2"), &a("3/7")).unwrap();
        assert_eq!(d.depth, 4);
        assert_eq!(d.c, rational(1, 1));
        assert!(d.holds);
    }

    #[test]
    fn distance_requires_ordering() {
        assert!(matches!(distance_bounds_check(&a("2/5"), &a("3/7")), Err(Error::Ordering(_))));
        assert!(matches!(distance_bounds_check(&a("3/7"), &a("0")), Err(Error::Ordering(_))));
        assert!(matches!(distance_bounds_check(&a("3/4"), &a("1/3")), Err(Error::Ordering(_))));
    }

    #[test]
    fn dyadic_detection() {
        assert!(a("1/2").is_dyadic());
        assert!(a("3/8").is_dyadic());
        assert!(a("1").is_dyadic());
        assert!(!a("0").is_dyadic());
        assert!(!a("1/3").is_dyadic());
        assert!(!a("5/12").is_dyadic());
    }
}

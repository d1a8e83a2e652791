//! The set ℛ of real kneading angles: `θ ∈ [0, 1/2]` whose doubling orbit never enters the
//! open interval `(θ, 1 - θ)`.
//!
//! Besides the membership test this module builds the combinatorial objects attached to a
//! purely periodic `θ ∈ ℛ` with period block `s`: its period doubling `.(s š)`, the tip
//! `.s(š)` of its small copy, and the periodic approximants used by the lower-bound probe.
//! Every angle outside ℛ lies in a gap `(θ, pd(θ))`; [`gap_root`] finds that `θ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::angles::BinaryAngle;
use crate::error::{Error, Result};
use crate::numeric::pow2;

/// Default period cap of [`approximant_below`].
pub const DEFAULT_PERIOD_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AngleClass {
    pub member: bool,
    pub purely_periodic: bool,
    /// Purely periodic member whose orbit never meets `1 - θ` (mod 1).
    pub primitive: bool,
    /// The orbit index that enters the hole (non-members) or lands on `1 - θ` (satellites).
    pub witness_k: Option<usize>,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn check_kneading_range(theta: &BinaryAngle) -> Result<()> {
    if theta.value() > &half() {
        return Err(Error::out_of_range(theta.to_fraction_string(), "[0, 1/2]"));
    }
    Ok(())
}

/// Exact membership test over the full finite orbit.
pub fn is_real_angle(theta: &BinaryAngle) -> Result<AngleClass> {
    check_kneading_range(theta)?;
    let x = theta.value();
    let top = BigRational::one() - x;
    let orbit = theta.orbit();
    if let Some(k) = orbit.iter().position(|y| x < y.value() && y.value() < &top) {
        return Ok(AngleClass {
            member: false,
            purely_periodic: theta.is_purely_periodic(),
            primitive: false,
            witness_k: Some(k),
        });
    }
    let purely_periodic = theta.is_purely_periodic();
    let mut witness_k = None;
    if purely_periodic {
        // 1 - θ taken mod 1, so θ = 0 meets it at k = 0
        let target = if x.is_zero() { BigRational::zero() } else { top };
        witness_k = orbit.iter().position(|y| y.value() == &target);
    }
    Ok(AngleClass {
        member: true,
        purely_periodic,
        primitive: purely_periodic && witness_k.is_none(),
        witness_k,
    })
}

fn require_periodic_member(theta: &BinaryAngle) -> Result<AngleClass> {
    let class = is_real_angle(theta)?;
    if !class.member || !class.purely_periodic {
        return Err(Error::Precondition(format!(
            "{} must be a purely periodic real angle",
            theta.to_fraction_string()
        )));
    }
    Ok(class)
}

fn complement_bits(block: &[u8]) -> Vec<u8> {
    block.iter().map(|b| 1 - b).collect()
}

/// `.(s š)` for `θ = .(s)`.
pub fn period_doubling(theta: &BinaryAngle) -> Result<BinaryAngle> {
    require_periodic_member(theta)?;
    let s = theta.period();
    let mut block = s.to_vec();
    block.extend(complement_bits(s));
    BinaryAngle::periodic(&block)
}

/// The tip `.s(š)` of the small copy `(θ, tip)` rooted at `θ = .(s)`. For `θ = 0` the
/// formula degenerates to `1/2`; the tip is taken to be `pd(0) = 1/3` instead.
pub fn small_copy_tip(theta: &BinaryAngle) -> Result<BinaryAngle> {
    require_periodic_member(theta)?;
    if theta.value().is_zero() {
        return period_doubling(theta);
    }
    let s = theta.period();
    BinaryAngle::from_digits(s, &complement_bits(s))
}

/// `δ = ½ min{D^k(θ) - (1 - θ) : D^k(θ) > 1 - θ}` for primitive `θ`. The top angle `1/2`
/// gets `δ = 1/12`, its distance to the tip `5/12` of the copy rooted at `1/3`.
pub fn default_delta(theta: &BinaryAngle) -> Result<BigRational> {
    if theta.value() == &half() {
        return Ok(BigRational::new(BigInt::one(), BigInt::from(12)));
    }
    let class = is_real_angle(theta)?;
    if !class.primitive {
        return Err(Error::Precondition(format!(
            "{} is not a primitive real angle",
            theta.to_fraction_string()
        )));
    }
    let top = BigRational::one() - theta.value();
    theta
        .orbit()
        .iter()
        .map(|y| y.value() - &top)
        .filter(|d| d > &BigRational::zero())
        .min()
        .map(|d| d / BigInt::from(2))
        .ok_or_else(|| Error::Precondition("orbit never exceeds 1 - θ".into()))
}

/// A purely periodic `θ' ∈ ℛ` with `θ - δ < θ' < θ`, searched by increasing period and,
/// within a period, downwards from `θ`. `delta` defaults to [`default_delta`]; a supplied
/// value must be positive and no larger.
pub fn approximant_below(theta: &BinaryAngle, delta: Option<&BigRational>, period_cap: usize) -> Result<BinaryAngle> {
    let default = default_delta(theta)?;
    let delta = match delta {
        None => default,
        Some(d) if d > &BigRational::zero() && d <= &default => d.clone(),
        Some(d) => {
            return Err(Error::Precondition(format!(
                "δ = {d} must lie in (0, {default}]"
            )))
        }
    };
    let x = theta.value();
    let floor = x - &delta;
    for q in 1..=period_cap {
        let den = pow2(q) - 1u32;
        // largest j with j/den < θ, down to the smallest with j/den > θ - δ
        let mut j = ceil_ratio(&(x * &den)) - 1u32;
        loop {
            let cand = BigRational::new(j.clone(), den.clone());
            if cand <= floor {
                break;
            }
            let angle = BinaryAngle::from_ratio(cand)?;
            if is_real_angle(&angle)?.member {
                return Ok(angle);
            }
            j -= 1u32;
        }
    }
    Err(Error::SearchExhausted { cap: period_cap })
}

fn ceil_ratio(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

/// `θ_m = .(s^m t)` for `θ = .(s)` and `θ' = .(t)`; `m = 1` gives the point `ξ`. The
/// result is re-checked for membership.
pub fn approximant_sequence(theta: &BinaryAngle, theta_prime: &BinaryAngle, m: usize) -> Result<BinaryAngle> {
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let delta = default_delta(theta)?;
    if !theta.is_purely_periodic() {
        return Err(Error::Precondition("θ must be purely periodic".into()));
    }
    require_periodic_member(theta_prime)?;
    let (x, y) = (theta.value(), theta_prime.value());
    if !(&(x - &delta) < y && y < x) {
        return Err(Error::Precondition(format!(
            "θ' = {} must lie in (θ - δ, θ) with δ = {delta}",
            theta_prime.to_fraction_string()
        )));
    }
    let mut block = Vec::with_capacity(m * theta.period().len() + theta_prime.period().len());
    for _ in 0..m {
        block.extend_from_slice(theta.period());
    }
    block.extend_from_slice(theta_prime.period());
    let out = BinaryAngle::periodic(&block)?;
    if !is_real_angle(&out)?.member {
        return Err(Error::MembershipRecheck(out.to_fraction_string()));
    }
    Ok(out)
}

/// For `x ∉ ℛ`, the purely periodic `θ ∈ ℛ` with `θ < x < pd(θ)`, together with
/// `pd(θ)`; `None` for members.
///
/// With `k` the first `n >= 1` such that `D^n(x)` falls in `(x, 1 - x)`, the root is
/// `θ = .(x_1 … x_k)`. The returned pair is verified before it is handed out.
pub fn gap_root(x: &BinaryAngle) -> Result<Option<(BinaryAngle, BinaryAngle)>> {
    let class = is_real_angle(x)?;
    if class.member {
        return Ok(None);
    }
    let v = x.value();
    let top = BigRational::one() - v;
    let k = x
        .orbit()
        .iter()
        .position(|y| v < y.value() && y.value() < &top)
        .expect("non-members have an orbit point in the hole");
    // k >= 1 because x itself is not inside (x, 1 - x)
    let theta = BinaryAngle::periodic(&x.prefix(k))?;
    let pd = period_doubling(&theta).map_err(|_| Error::MembershipRecheck(theta.to_fraction_string()))?;
    if !(theta.value() < v && v < pd.value()) {
        return Err(Error::MembershipRecheck(format!(
            "{} not in gap ({}, {})",
            x.to_fraction_string(),
            theta.to_fraction_string(),
            pd.to_fraction_string()
        )));
    }
    Ok(Some((theta, pd)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;

    fn a(s: &str) -> BinaryAngle {
        s.parse().unwrap()
    }

    #[test]
    fn membership_examples() {
        let c = is_real_angle(&a("0")).unwrap();
        assert!(c.member);

        let c = is_real_angle(&a("1/4")).unwrap();
        assert!(!c.member);
        assert_eq!(c.witness_k, Some(1));

        let c = is_real_angle(&a("2/5")).unwrap();
        assert!(c.member && c.purely_periodic && !c.primitive);
        assert_eq!(c.witness_k, Some(2));

        let c = is_real_angle(&a("3/7")).unwrap();
        assert!(c.member && c.primitive);
        assert_eq!(c.witness_k, None);

        let c = is_real_angle(&a("1/2")).unwrap();
        assert!(c.member && !c.purely_periodic && !c.primitive);

        assert!(matches!(is_real_angle(&a("3/5")), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn period_doubling_examples() {
        assert_eq!(period_doubling(&a("0")).unwrap(), a("1/3"));
        assert_eq!(period_doubling(&a("1/3")).unwrap(), a("2/5"));
        assert_eq!(period_doubling(&a("3/7")).unwrap(), a("4/9"));
        assert!(period_doubling(&a("1/2")).is_err());
        assert!(period_doubling(&a("1/5")).is_err());
    }

    #[test]
    fn tips() {
        assert_eq!(small_copy_tip(&a("3/7")).unwrap(), a("25/56"));
        assert_eq!(small_copy_tip(&a("1/3")).unwrap(), a("5/12"));
        assert_eq!(small_copy_tip(&a("0")).unwrap(), a("1/3"));
    }

    #[test]
    fn delta_and_approximants() {
        assert_eq!(default_delta(&a("3/7")).unwrap(), rational(1, 14));
        assert_eq!(
            approximant_below(&a("3/7"), Some(&rational(1, 20)), DEFAULT_PERIOD_CAP).unwrap(),
            a("2/5")
        );
        assert_eq!(approximant_below(&a("1/2"), None, DEFAULT_PERIOD_CAP).unwrap(), a("3/7"));
        assert_eq!(
            approximant_below(&a("3/7"), None, 2),
            Err(Error::SearchExhausted { cap: 2 })
        );
        assert!(approximant_below(&a("2/5"), None, DEFAULT_PERIOD_CAP).is_err());
    }

    #[test]
    fn approximant_sequence_examples() {
        let (t, tp) = (a("3/7"), a("2/5"));
        assert_eq!(approximant_sequence(&t, &tp, 1).unwrap(), a("54/127"));
        assert_eq!(approximant_sequence(&t, &tp, 2).unwrap(), a("438/1023"));
        for m in 1..6 {
            let tm = approximant_sequence(&t, &tp, m).unwrap();
            assert!(crate::angles::agreement_depth(&tm, &t).unwrap() > 3 * m);
        }
        assert!(approximant_sequence(&t, &a("1/3"), 1).is_err());
    }

    #[test]
    fn gap_roots() {
        let (r, pd) = gap_root(&a("11/30")).unwrap().unwrap();
        assert_eq!((r, pd), (a("1/3"), a("2/5")));
        let (r, _) = gap_root(&a("1/4")).unwrap().unwrap();
        assert_eq!(r, a("0"));
        assert_eq!(gap_root(&a("3/7")).unwrap(), None);
    }
}

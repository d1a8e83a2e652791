//! Kneading series and certified entropy.
//!
//! For `θ = .b1 b2 b3 …` in canonical form the kneading series is
//! `P(t) = 1 + Σ_{k≥1} ε_k t^k` with `ε_k = (-1)^{b_{k+1}}`. Eventually periodic digits make
//! it rational, `P = N / (1 - t^L)`. The smallest root `r` of `N` in `(0, 1)` gives the
//! entropy `h = -log r`; no root means `h = 0`.
//!
//! Root enclosures are exact dyadic intervals (see [`crate::poly`]); logarithms are taken
//! in `f64` and rounded outward, so every reported float is an enclosure endpoint.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::angles::BinaryAngle;
use crate::error::{Error, Result};
use crate::numeric::{bits_for_tolerance, ln1p_interval, to_f64_down, to_f64_up};
use crate::poly::{first_root_01, refine_by_bisection, refine_by_newton, Dyadic, IntPoly, Isolated, SearchOrder};
use crate::realset;

/// Kneading series of an angle in exact rational form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneadingSeries {
    /// `ε_1 … ε_a`.
    pub preperiod: Vec<i8>,
    /// `ε_{a+1} … ε_{a+L}`, repeated forever.
    pub period: Vec<i8>,
    /// `N(t)` with `P(t) = N(t) / (1 - t^L)`.
    pub numerator: IntPoly,
    /// `L`.
    pub denominator_exponent: usize,
    pub source: BinaryAngle,
}

impl KneadingSeries {
    /// `ε_k` for `k >= 1`; `coefficient(0)` is the constant term 1.
    pub fn coefficient(&self, k: usize) -> i8 {
        if k == 0 {
            return 1;
        }
        let i = k - 1;
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Exact value `N(t) / (1 - t^L)` for `0 < t < 1`.
    pub fn evaluate_exact(&self, t: &BigRational) -> Result<BigRational> {
        check_unit(t)?;
        Ok(self.numerator.eval(t) / denominator_at(self.denominator_exponent, t))
    }

    /// Enclosure of `P(t)` from the partial sum through `t^depth` and the tail bound
    /// `t^{depth+1} / (1 - t)`.
    pub fn evaluate_truncated(&self, t: &BigRational, depth: usize) -> Result<(BigRational, BigRational)> {
        check_unit(t)?;
        let mut sum = BigRational::zero();
        let mut pow = BigRational::one();
        for k in 0..=depth {
            sum += &pow * BigInt::from(self.coefficient(k));
            pow *= t;
        }
        let tail = pow / (BigRational::one() - t);
        Ok((&sum - &tail, sum + tail))
    }

    /// `P'(t)` exactly, from the quotient rule on `N / (1 - t^L)`.
    pub fn derivative_exact(&self, t: &BigRational) -> BigRational {
        let l = self.denominator_exponent;
        let den = denominator_at(l, t);
        let n = self.numerator.eval(t);
        let dn = self.numerator.derivative().eval(t);
        let tl1 = pow_rational(t, l - 1);
        (dn * &den + n * tl1 * BigInt::from(l)) / (&den * &den)
    }

    /// Checks that `N / (1 - t^L)` expands to `1, ε_1, ε_2, …` for `terms` coefficients.
    pub fn expansion_matches(&self, terms: usize) -> bool {
        let l = self.denominator_exponent;
        let coeffs = self.numerator.coeffs();
        (0..terms).all(|k| {
            let c: BigInt = (0..=k / l)
                .filter_map(|j| coeffs.get(k - j * l))
                .sum();
            c == BigInt::from(self.coefficient(k))
        })
    }
}

fn check_unit(t: &BigRational) -> Result<()> {
    if !(t.is_positive() && t < &BigRational::one()) {
        return Err(Error::out_of_range(t, "(0, 1)"));
    }
    Ok(())
}

fn pow_rational(t: &BigRational, e: usize) -> BigRational {
    num_traits::pow(t.clone(), e)
}

fn denominator_at(l: usize, t: &BigRational) -> BigRational {
    BigRational::one() - pow_rational(t, l)
}

fn sign_of_digit(b: u8) -> i8 {
    if b == 0 {
        1
    } else {
        -1
    }
}

fn check_kneading_range(theta: &BinaryAngle) -> Result<()> {
    if theta.value() > &BigRational::new(BigInt::one(), BigInt::from(2)) {
        return Err(Error::out_of_range(theta.to_fraction_string(), "[0, 1/2]"));
    }
    Ok(())
}

/// Builds `P_θ` from the canonical digits of `θ ∈ [0, 1/2]`.
pub fn series_from_angle(theta: &BinaryAngle) -> Result<KneadingSeries> {
    check_kneading_range(theta)?;
    // ε_k reads digit k + 1: drop the first digit of the stored expansion
    let (pre_digits, per_digits): (Vec<u8>, Vec<u8>) = if theta.preperiod().is_empty() {
        let mut p = theta.period().to_vec();
        p.rotate_left(1);
        (Vec::new(), p)
    } else {
        (theta.preperiod()[1..].to_vec(), theta.period().to_vec())
    };
    let preperiod: Vec<i8> = pre_digits.iter().map(|&b| sign_of_digit(b)).collect();
    let period: Vec<i8> = per_digits.iter().map(|&b| sign_of_digit(b)).collect();
    let (a, l) = (preperiod.len(), period.len());

    // N = A(t)(1 - t^L) + t^a B(t), A = 1 + Σ_{k≤a} ε_k t^k, B = Σ_j ε_{a+1+j} t^{j+1}
    let mut head = vec![BigInt::one()];
    head.extend(preperiod.iter().map(|&e| BigInt::from(e)));
    let mut tail = vec![BigInt::zero(); a + 1];
    tail.extend(period.iter().map(|&e| BigInt::from(e)));
    let numerator = &(&IntPoly::new(head) * &IntPoly::one_minus_t_pow(l)) + &IntPoly::new(tail);

    let series = KneadingSeries {
        preperiod,
        period,
        numerator,
        denominator_exponent: l,
        source: theta.clone(),
    };
    if !series.expansion_matches(2 * (a + l) + 1) {
        return Err(Error::Precondition(format!(
            "kneading series of {} failed its expansion check",
            theta.to_fraction_string()
        )));
    }
    Ok(series)
}

/// Settings of the certified root finder.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyConfig {
    /// Target width of the root enclosure.
    pub tol: f64,
    /// Bisection cap per refinement.
    pub max_bisections: usize,
    /// Fractional bits of the fixed-point Newton fast path.
    pub precision_bits: usize,
    pub fast_path: bool,
    /// Subdivision depth at which isolation gives up and reports a multiple root.
    pub max_isolation_depth: usize,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            tol: 1e-12,
            max_bisections: 10_000,
            precision_bits: 128,
            fast_path: true,
            max_isolation_depth: 256,
        }
    }
}

impl EntropyConfig {
    pub fn with_tol(tol: f64) -> Self {
        EntropyConfig {
            tol,
            precision_bits: Self::default().precision_bits.max(bits_for_tolerance(tol) + 32),
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Isolated simple root with a positive derivative bound.
    Root,
    /// Descartes count 0 on all of `(0, 1)`.
    NoRoot,
    /// Two-sided bound from a truncated digit stream.
    Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyResult {
    pub angle: Option<BinaryAngle>,
    pub certificate: Certificate,
    /// Root enclosure; `[1, 1]` when there is no root.
    pub r_lo: BigRational,
    pub r_hi: BigRational,
    pub entropy_lo: f64,
    pub entropy_hi: f64,
    /// Lower bound of `|P'|` on the enclosure (roots only).
    pub derivative_lb: Option<f64>,
    /// Enclosure of `s = e^h = 1/r`.
    pub growth_lo: f64,
    pub growth_hi: f64,
    /// Set by the stream variant when the target width was not reached.
    pub widened: bool,
    /// Digits used by the stream variant.
    pub depth: Option<usize>,
}

#[derive(Serialize)]
struct EntropyRecord<'a> {
    angle: Option<String>,
    r_lo: f64,
    r_hi: f64,
    entropy_lo: f64,
    entropy_hi: f64,
    derivative_lb: Option<f64>,
    certificate: &'a Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    widened: bool,
}

impl EntropyResult {
    fn from_root_enclosure(r_lo: BigRational, r_hi: BigRational, certificate: Certificate) -> Self {
        let one = BigRational::one();
        let (lnlo, lnhi) = ln1p_interval(&(&r_lo - &one), &(&r_hi - &one));
        let (entropy_lo, entropy_hi) = if r_lo == one && r_hi == one {
            (0.0, 0.0)
        } else {
            ((-lnhi).max(0.0), -lnlo)
        };
        EntropyResult {
            angle: None,
            certificate,
            growth_lo: to_f64_down(&(&one / &r_hi)),
            growth_hi: to_f64_up(&(&one / &r_lo)),
            r_lo,
            r_hi,
            entropy_lo,
            entropy_hi,
            derivative_lb: None,
            widened: false,
            depth: None,
        }
    }

    fn no_root() -> Self {
        Self::from_root_enclosure(BigRational::one(), BigRational::one(), Certificate::NoRoot)
    }

    pub fn entropy_mid(&self) -> f64 {
        0.5 * (self.entropy_lo + self.entropy_hi)
    }

    pub fn width(&self) -> f64 {
        self.entropy_hi - self.entropy_lo
    }

    /// JSON record `{angle, r_lo, r_hi, entropy_lo, entropy_hi, derivative_lb, certificate}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(EntropyRecord {
            angle: self.angle.as_ref().map(BinaryAngle::to_fraction_string),
            r_lo: to_f64_down(&self.r_lo),
            r_hi: to_f64_up(&self.r_hi),
            entropy_lo: self.entropy_lo,
            entropy_hi: self.entropy_hi,
            derivative_lb: self.derivative_lb,
            certificate: &self.certificate,
            depth: self.depth,
            widened: self.widened,
        })
        .expect("entropy record serializes")
    }
}

/// Minimal root of `N` in `(0, 1)`: `None` if there is none, else an enclosure of width at
/// most `2^{-bits}` (or an exact dyadic root).
fn minimal_root(n: &IntPoly, bits: usize, cfg: &EntropyConfig) -> Result<Option<Isolated>> {
    let (core, _) = n.strip_one_minus_t();
    let Some(iso) = first_root_01(&core, SearchOrder::LeftFirst, cfg.max_isolation_depth)? else {
        return Ok(None);
    };
    if cfg.fast_path {
        if let Some(found) = refine_by_newton(&core, &iso, bits, cfg.precision_bits) {
            return Ok(Some(found));
        }
    }
    refine_by_bisection(&core, &iso, bits, cfg.max_bisections).map(Some)
}

fn enclosure(iso: &Isolated) -> (BigRational, BigRational) {
    match iso {
        Isolated::Exact(x) => (x.to_rational(), x.to_rational()),
        Isolated::Interval(lo, hi) => (lo.to_rational(), hi.to_rational()),
    }
}

/// `|P'(mid)| - (w/2) max|P''|` with `|P''(t)| <= 2 / (1 - t)^3` for ±1 coefficients.
fn derivative_lower_bound(series: &KneadingSeries, lo: &BigRational, hi: &BigRational) -> BigRational {
    let mid = (lo + hi) / BigInt::from(2);
    let w = hi - lo;
    let one_minus = BigRational::one() - hi;
    let curvature = &one_minus * &one_minus * &one_minus;
    series.derivative_exact(&mid).abs() - w / curvature
}

/// Certified entropy of `θ ∈ [0, 1/2]`.
pub fn entropy(theta: &BinaryAngle, cfg: &EntropyConfig) -> Result<EntropyResult> {
    let series = series_from_angle(theta)?;
    entropy_of_series(&series, cfg)
}

pub fn entropy_of_series(series: &KneadingSeries, cfg: &EntropyConfig) -> Result<EntropyResult> {
    let mut bits = bits_for_tolerance(cfg.tol);
    let Some(mut iso) = minimal_root(&series.numerator, bits, cfg)? else {
        let mut out = EntropyResult::no_root();
        out.angle = Some(series.source.clone());
        return Ok(out);
    };
    // tighten until the derivative bound is positive
    let bits_cap = bits + cfg.max_bisections;
    loop {
        let (lo, hi) = enclosure(&iso);
        let lb = derivative_lower_bound(series, &lo, &hi);
        if lb.is_positive() {
            let mut out = EntropyResult::from_root_enclosure(lo, hi, Certificate::Root);
            out.derivative_lb = Some(to_f64_down(&lb));
            out.angle = Some(series.source.clone());
            return Ok(out);
        }
        if matches!(iso, Isolated::Exact(_)) || bits >= bits_cap {
            return Err(Error::SuspectedMultipleRoot {
                near: format!("{:.17}", crate::numeric::to_f64(&lo)),
            });
        }
        bits = (bits * 2).min(bits_cap);
        let (core, _) = series.numerator.strip_one_minus_t();
        iso = match refine_by_newton(&core, &iso, bits, cfg.precision_bits.max(bits + 32)) {
            Some(found) if cfg.fast_path => found,
            _ => refine_by_bisection(&core, &iso, bits, cfg.max_bisections)?,
        };
    }
}

/// Entropy extended to all of `[0, 1/2]` by constancy on the gaps of ℛ: members get
/// [`entropy`], any other `x` the entropy of its gap root (see [`realset::gap_root`]).
pub fn extended_entropy(x: &BinaryAngle, cfg: &EntropyConfig) -> Result<EntropyResult> {
    let root = match realset::gap_root(x)? {
        None => x.clone(),
        Some((theta, _)) => theta,
    };
    let mut out = entropy(&root, cfg)?;
    out.angle = Some(x.clone());
    Ok(out)
}

/// Enclosure of `h(b) - h(a) = log(r_a / r_b)` from two results.
pub fn entropy_difference(a: &EntropyResult, b: &EntropyResult) -> (f64, f64) {
    if a.r_lo == b.r_lo && a.r_hi == b.r_hi && a.r_lo == a.r_hi {
        return (0.0, 0.0);
    }
    let one = BigRational::one();
    let lo = &a.r_lo / &b.r_hi - &one;
    let hi = &a.r_hi / &b.r_lo - &one;
    ln1p_interval(&lo, &hi)
}

/// Settings of [`entropy_stream`].
#[derive(Clone, Debug, PartialEq)]
pub struct StreamConfig {
    pub tol: f64,
    /// Hard cap on the number of digits read.
    pub max_depth: usize,
    pub root: EntropyConfig,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig {
            tol: 1e-10,
            max_depth: 1 << 10,
            root: EntropyConfig::default(),
        }
    }
}

/// Entropy enclosure valid for every angle whose digits start with the given prefix.
///
/// With `Q` the series truncated after `t^d`, every such angle has
/// `|P - Q| <= t^{d+1} / (1 - t)`, so `P > 0` below the first root of
/// `Q(1 - t) - t^{d+1}` and `P < 0` somewhere below the first sign change of
/// `Q(1 - t) + t^{d+1}`. Entropy is weakly increasing in the angle, so the extended
/// entropies at the smallest and largest angles with the prefix bound it too; the result
/// is the intersection of both enclosures. The depth doubles from `depth` until the entropy width is at most
/// `cfg.tol` or `cfg.max_depth` is reached, in which case `widened` is set.
pub fn entropy_stream(mut digit: impl FnMut(usize) -> u8, depth: usize, cfg: &StreamConfig) -> Result<EntropyResult> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be positive".into()));
    }
    if digit(1) != 0 {
        return Err(Error::Precondition("kneading digits start with 0".into()));
    }
    let mut d = depth.min(cfg.max_depth);
    loop {
        let mut res = stream_at_depth(&mut digit, d, &cfg.root)?;
        res.depth = Some(d);
        if res.width() <= cfg.tol {
            return Ok(res);
        }
        if d >= cfg.max_depth {
            res.widened = true;
            return Ok(res);
        }
        d = (2 * d).min(cfg.max_depth);
    }
}

fn stream_at_depth(digit: &mut impl FnMut(usize) -> u8, d: usize, cfg: &EntropyConfig) -> Result<EntropyResult> {
    let mut q = vec![BigInt::one()];
    q.extend((1..=d).map(|k| BigInt::from(sign_of_digit(digit(k + 1)))));
    let base = &IntPoly::new(q) * &IntPoly::from_i64(&[1, -1]);
    let edge = IntPoly::monomial(1, d + 1);
    let lower = &base - &edge;
    let upper = &base + &edge;
    let bits = bits_for_tolerance(cfg.tol);

    let tail_lo = match minimal_root(&lower, bits, cfg)? {
        None => BigRational::one(),
        Some(iso) => enclosure(&iso).0,
    };
    let tail_hi = match minimal_root(&upper, bits, cfg)? {
        None => BigRational::one(),
        Some(Isolated::Interval(_, hi)) => hi.to_rational(),
        Some(Isolated::Exact(x)) => first_negative_right_of(&upper, &x).unwrap_or_else(BigRational::one),
    };

    // monotone bracket: every angle with this prefix lies between .w(0) and .w(1)
    let prefix: Vec<u8> = (1..=d + 1).map(|k| digit(k)).collect();
    let below = extended_entropy(&BinaryAngle::from_digits(&prefix, &[0])?, cfg)?;
    let above = extended_entropy(&BinaryAngle::from_digits(&prefix, &[1])?, cfg)?;
    let r_lo = tail_lo.max(above.r_lo);
    let r_hi = tail_hi.min(below.r_hi);
    Ok(EntropyResult::from_root_enclosure(r_lo, r_hi, Certificate::Interval))
}

/// A point just right of the dyadic root `x` where `p` is negative, if one is found.
fn first_negative_right_of(p: &IntPoly, x: &Dyadic) -> Option<BigRational> {
    (1..64).find_map(|extra| {
        let k = x.k + extra;
        let y = Dyadic::new((&x.m << extra) + 1u32, k);
        (p.sign_at(&y) < 0 && y.to_rational() < BigRational::one()).then(|| y.to_rational())
    })
}

/// Checks `N'(1 + t^p)(1 - t^L) = N(1 - t^p)(1 - t^{L'})` for `θ' = pd(θ)`, i.e.
/// `P_{θ'} = P_θ (1 - t^p) / (1 + t^p)`.
pub fn pd_identity_check(theta: &BinaryAngle) -> Result<bool> {
    let doubled = realset::period_doubling(theta)?;
    let p = theta.period().len();
    let s = series_from_angle(theta)?;
    let s2 = series_from_angle(&doubled)?;
    let lhs = &(&s2.numerator * &IntPoly::one_plus_t_pow(p)) * &IntPoly::one_minus_t_pow(s.denominator_exponent);
    let rhs = &(&s.numerator * &IntPoly::one_minus_t_pow(p)) * &IntPoly::one_minus_t_pow(s2.denominator_exponent);
    Ok(lhs == rhs)
}

/// `P_θ - P_θ' = t^n h(t)` at a given `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// First coefficient index where the series differ.
    pub n: usize,
    /// `ε_n - ε'_n = ±2`, the constant term of `h`.
    pub leading: i8,
    /// `h(t)`.
    pub remainder: BigRational,
}

pub fn difference_decomposition(theta: &BinaryAngle, theta_prime: &BinaryAngle, t: &BigRational) -> Result<Decomposition> {
    if theta == theta_prime {
        return Err(Error::EqualAngles);
    }
    check_unit(t)?;
    let s = series_from_angle(theta)?;
    let s2 = series_from_angle(theta_prime)?;
    let limit = 2 * (s.preperiod.len() + s.period.len() + s2.preperiod.len() + s2.period.len()) + 2;
    let n = (1..=limit)
        .find(|&k| s.coefficient(k) != s2.coefficient(k))
        .ok_or_else(|| Error::Precondition("series agree although angles differ".into()))?;
    let diff = s.evaluate_exact(t)? - s2.evaluate_exact(t)?;
    Ok(Decomposition {
        n,
        leading: s.coefficient(n) - s2.coefficient(n),
        remainder: diff / pow_rational(t, n),
    })
}

/// Outcome of the root-shift inequality `|r' - r| <= |h(ρ)| ρ^n / min|P'_θ'|` with ρ the
/// larger root enclosure end.
#[derive(Clone, Debug, PartialEq)]
pub struct RootShift {
    pub shift_upper: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Companion check of [`difference_decomposition`] at the roots: both angles need
/// positive entropy.
pub fn root_shift_check(theta: &BinaryAngle, theta_prime: &BinaryAngle, cfg: &EntropyConfig) -> Result<RootShift> {
    let a = entropy(theta, cfg)?;
    let b = entropy(theta_prime, cfg)?;
    if a.certificate != Certificate::Root || b.certificate != Certificate::Root {
        return Err(Error::Precondition("both angles need a kneading root".into()));
    }
    let s2 = series_from_angle(theta_prime)?;
    let lo = a.r_lo.clone().min(b.r_lo.clone());
    let hi = a.r_hi.clone().max(b.r_hi.clone());
    let shift = (&a.r_hi - &b.r_lo).abs().max((&b.r_hi - &a.r_lo).abs());
    // P_θ'(r) = -r^n h(r); mean value theorem on [lo, hi]
    let dlb = derivative_lower_bound(&s2, &lo, &hi);
    let r = a.r_hi.clone();
    let dec = difference_decomposition(theta, theta_prime, &r)?;
    let lhs_rhs = dec.remainder.abs() * pow_rational(&r, dec.n);
    if !dlb.is_positive() {
        return Ok(RootShift {
            shift_upper: to_f64_up(&shift),
            bound: f64::INFINITY,
            holds: true,
        });
    }
    // slack for the enclosure widths of both roots
    let slack = (&a.r_hi - &a.r_lo) + (&b.r_hi - &b.r_lo);
    let bound = lhs_rhs / &dlb + &slack * BigInt::from(2);
    Ok(RootShift {
        shift_upper: to_f64_up(&shift),
        bound: to_f64_up(&bound),
        holds: shift <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rational, to_f64};

    fn a(s: &str) -> BinaryAngle {
        s.parse().unwrap()
    }

    fn golden_log() -> f64 {
        ((1.0 + 5f64.sqrt()) / 2.0).ln()
    }

    #[test]
    fn series_examples() {
        let s = series_from_angle(&a("1/2")).unwrap();
        assert_eq!(s.numerator, IntPoly::from_i64(&[1, -2]));
        assert_eq!(s.denominator_exponent, 1);
        assert!((1..10).all(|k| s.coefficient(k) == -1));

        let s = series_from_angle(&a("1/3")).unwrap();
        assert_eq!(s.period, vec![-1, 1]);
        assert_eq!(s.numerator, IntPoly::from_i64(&[1, -1]));

        let s = series_from_angle(&a("3/7")).unwrap();
        assert_eq!(s.period, vec![-1, -1, 1]);
        assert_eq!(s.numerator, IntPoly::from_i64(&[1, -1, -1]));
        assert_eq!(s.denominator_exponent, 3);

        let s = series_from_angle(&a("0")).unwrap();
        assert!((1..10).all(|k| s.coefficient(k) == 1));
        assert_eq!(s.numerator, IntPoly::one());

        assert!(series_from_angle(&a("3/4")).is_err());
    }

    #[test]
    fn evaluation() {
        let s = series_from_angle(&a("3/7")).unwrap();
        assert_eq!(s.evaluate_exact(&rational(1, 2)).unwrap(), rational(2, 7));
        let z = series_from_angle(&a("0")).unwrap();
        assert_eq!(z.evaluate_exact(&rational(1, 3)).unwrap(), rational(3, 2));
        let h = series_from_angle(&a("1/2")).unwrap();
        let t = rational(49, 100);
        let (lo, hi) = h.evaluate_truncated(&t, 100).unwrap();
        let exact = h.evaluate_exact(&t).unwrap();
        assert!(lo <= exact && exact <= hi);
        assert!(to_f64(&(hi - lo)) <= 2.0 * 0.49f64.powi(101) / 0.51 * 1.000001);
        assert!(s.evaluate_exact(&rational(1, 1)).is_err());
    }

    #[test]
    fn entropy_anchors() {
        let cfg = EntropyConfig::default();
        let r = entropy(&a("1/2"), &cfg).unwrap();
        assert_eq!(r.r_lo, rational(1, 2));
        assert_eq!(r.r_hi, rational(1, 2));
        assert!(r.entropy_lo <= 2f64.ln() && 2f64.ln() <= r.entropy_hi);

        let r = entropy(&a("3/7"), &cfg).unwrap();
        assert_eq!(r.certificate, Certificate::Root);
        assert!(r.entropy_lo <= golden_log() && golden_log() <= r.entropy_hi);
        assert!(r.width() < 1e-11);
        assert!(r.derivative_lb.unwrap() > 0.0);

        for s in ["0", "1/3", "2/5"] {
            let r = entropy(&a(s), &cfg).unwrap();
            assert_eq!(r.certificate, Certificate::NoRoot, "{s}");
            assert_eq!((r.entropy_lo, r.entropy_hi), (0.0, 0.0));
        }
    }

    #[test]
    fn newton_and_bisection_agree() {
        let mut slow = EntropyConfig::default();
        slow.fast_path = false;
        for s in ["3/7", "25/56", "54/127", "33/80", "5/12"] {
            let f = entropy(&a(s), &EntropyConfig::default()).unwrap();
            let b = entropy(&a(s), &slow).unwrap();
            assert!(f.entropy_lo <= b.entropy_hi && b.entropy_lo <= f.entropy_hi, "{s}");
        }
    }

    #[test]
    fn extension_on_gaps() {
        let cfg = EntropyConfig::default();
        let r = extended_entropy(&a("11/30"), &cfg).unwrap();
        assert_eq!(r.entropy_hi, 0.0);
        let r = extended_entropy(&a("7/16"), &cfg).unwrap();
        assert!(r.entropy_lo <= golden_log() && golden_log() <= r.entropy_hi);
    }

    #[test]
    fn stream_bounds() {
        let cfg = StreamConfig::default();
        let t = a("3/7");
        let r = entropy_stream(|k| t.digit(k), 64, &cfg).unwrap();
        assert!(r.entropy_lo <= golden_log() && golden_log() <= r.entropy_hi);
        assert!(r.width() <= 1e-10);
        let z = a("0");
        let r = entropy_stream(|k| z.digit(k), 16, &cfg).unwrap();
        assert_eq!((r.entropy_lo, r.entropy_hi), (0.0, 0.0));
    }

    #[test]
    fn pd_identity_examples() {
        for s in ["1/3", "3/7", "0"] {
            assert!(pd_identity_check(&a(s)).unwrap(), "{s}");
        }
        assert!(pd_identity_check(&a("1/2")).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let d = difference_decomposition(&a("3/7"), &a("2/5"), &rational(3, 5)).unwrap();
        assert_eq!(d.n, 4);
        assert_eq!(d.leading.abs(), 2);
        assert!(d.remainder.abs() <= rational(2, 1) / (rational(1, 1) - rational(3, 5)));
    }

    #[test]
    fn root_shift() {
        let r = root_shift_check(&a("3/7"), &a("54/127"), &EntropyConfig::with_tol(1e-30)).unwrap();
        assert!(r.holds, "{r:?}");
    }
}

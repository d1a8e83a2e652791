//! Dense integer polynomials with exact root isolation on `(0, 1)`.
//!
//! Isolation is the Vincent–Collins–Akritas bisection: an interval `(c/2^k, (c+1)/2^k)` is
//! represented by the integer polynomial `q(x) = 2^{kd} p((x + c) / 2^k)`, and Descartes'
//! rule of signs applied to `(1 + x)^d q(1 / (1 + x))` bounds the number of roots inside.
//! A count of 0 or 1 is exact. Signs at dyadic points are evaluated without rounding.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{dyadic, sign};

/// Polynomial with integer coefficients, stored lowest degree first and without
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

/// The dyadic rational `m / 2^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub m: BigInt,
    pub k: usize,
}

impl Dyadic {
    pub fn new(m: BigInt, k: usize) -> Self {
        Dyadic { m, k }
    }

    pub fn to_rational(&self) -> BigRational {
        dyadic(self.m.clone(), self.k)
    }

    /// Same value with denominator `2^k2`, `k2 >= self.k`.
    pub fn rescale(&self, k2: usize) -> Dyadic {
        assert!(k2 >= self.k);
        Dyadic::new(&self.m << (k2 - self.k), k2)
    }
}

/// Result of isolating one real root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Isolated {
    /// The root is this dyadic number.
    Exact(Dyadic),
    /// Exactly one root, simple, in the open interval `(lo, hi)`; both ends share `k`.
    Interval(Dyadic, Dyadic),
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `c t^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c.into();
        Self::new(v)
    }

    /// `1 - t^l` (`l >= 1`).
    pub fn one_minus_t_pow(l: usize) -> Self {
        Self::one() - Self::monomial(1, l)
    }

    /// `1 + t^l`.
    pub fn one_plus_t_pow(l: usize) -> Self {
        Self::one() + Self::monomial(1, l)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + BigRational::from_integer(c.clone()))
    }

    pub fn eval_int(&self, t: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    /// `2^{k·deg} p(m / 2^k)`, an integer with the sign of `p(m / 2^k)`.
    pub fn scaled_value_at(&self, x: &Dyadic) -> BigInt {
        let Some(d) = self.degree() else {
            return BigInt::zero();
        };
        let mut acc = self.coeffs[d].clone();
        for i in (0..d).rev() {
            acc = acc * &x.m + (&self.coeffs[i] << (x.k * (d - i)));
        }
        acc
    }

    pub fn sign_at(&self, x: &Dyadic) -> i8 {
        sign(&self.scaled_value_at(x))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Divides by `1 - t` if it is a factor.
    pub fn div_one_minus_t(&self) -> Option<Self> {
        let (q, r) = self.div_by_linear(&BigInt::one());
        r.is_zero().then(|| -q)
    }

    /// Removes every factor `1 - t`; returns the cofactor and the multiplicity.
    pub fn strip_one_minus_t(&self) -> (Self, usize) {
        let mut p = self.clone();
        let mut count = 0;
        while !p.is_zero() {
            match p.div_one_minus_t() {
                Some(q) => {
                    p = q;
                    count += 1;
                }
                None => break,
            }
        }
        (p, count)
    }

    /// Synthetic division by `t - a`: quotient and remainder `p(a)`.
    fn div_by_linear(&self, a: &BigInt) -> (Self, BigInt) {
        let Some(d) = self.degree() else {
            return (Self::zero(), BigInt::zero());
        };
        let mut q = vec![BigInt::zero(); d];
        let mut carry = BigInt::zero();
        for i in (0..=d).rev() {
            let v = &self.coeffs[i] + &carry * a;
            if i == 0 {
                return (Self::new(q), v);
            }
            q[i - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// `p(t + 1)`.
    pub fn taylor_shift_one(&self) -> Self {
        let mut a = self.coeffs.clone();
        taylor_shift_in_place(&mut a);
        Self::new(a)
    }

    /// Greatest common divisor of the coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.coeffs.last().is_some_and(Signed::is_negative) {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Polynomial division over the rationals, returned as (quotient, remainder) scaled to
    /// primitive integer polynomials. Only the zero-ness of the remainder and the quotient
    /// up to a constant factor are meaningful.
    fn div_rem_primitive(&self, other: &Self) -> (Self, Self) {
        let dv = other.degree().expect("division by zero polynomial");
        let lead = BigRational::from_integer(other.coeffs[dv].clone());
        let mut r: Vec<BigRational> = self
            .coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let n = self.coeffs.len();
        if n <= dv {
            return (Self::zero(), self.primitive());
        }
        let mut q = vec![BigRational::zero(); n - dv];
        for i in (dv..n).rev() {
            let f = &r[i] / &lead;
            if f.is_zero() {
                continue;
            }
            for (j, c) in other.coeffs.iter().enumerate() {
                r[i - dv + j] -= &f * BigRational::from_integer(c.clone());
            }
            q[i - dv] = f;
        }
        r.truncate(dv);
        (rational_to_primitive(&q), rational_to_primitive(&r))
    }

    /// Primitive greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        while !b.is_zero() {
            let (_, r) = a.div_rem_primitive(&b);
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// Product of the distinct irreducible factors, as a primitive polynomial.
    pub fn square_free(&self) -> Self {
        let d = self.derivative();
        if d.is_zero() {
            return self.primitive();
        }
        let g = self.gcd(&d);
        if g.degree() == Some(0) {
            return self.primitive();
        }
        self.div_rem_primitive(&g).0
    }

    /// Coefficients of `(1 + x)^d p(1 / (1 + x))` change sign this many times; an upper
    /// bound (with the same parity) for the number of roots in `(0, 1)`.
    pub fn descartes_bound_01(&self) -> usize {
        let mut a: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        taylor_shift_in_place(&mut a);
        sign_variations(&a)
    }
}

fn rational_to_primitive(v: &[BigRational]) -> IntPoly {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    IntPoly::new(v.iter().map(|c| (c * &l).to_integer()).collect()).primitive()
}

/// In place `a(x) ← a(x + 1)`.
fn taylor_shift_in_place(a: &mut [BigInt]) {
    let n = a.len();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            let (lo, hi) = a.split_at_mut(j + 1);
            lo[j] += &hi[0];
        }
    }
}

fn sign_variations(a: &[BigInt]) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for c in a {
        let s = sign(c);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Removes the largest power of two dividing every coefficient.
fn drop_common_twos(a: &mut [BigInt]) {
    let tz = a.iter().filter_map(|c| c.trailing_zeros()).min().unwrap_or(0);
    if tz > 0 {
        for c in a.iter_mut() {
            *c >>= tz;
        }
    }
}

impl Add for IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: IntPoly) -> IntPoly {
        &self + &rhs
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: IntPoly) -> IntPoly {
        &self - &rhs
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: IntPoly) -> IntPoly {
        &self * &rhs
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntPoly::new(out)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchOrder {
    LeftFirst,
    RightFirst,
}

enum Item {
    Node { k: usize, c: BigInt, q: Vec<BigInt> },
    Point(Dyadic),
}

/// The first root of `p` in the open interval `(0, 1)` in the given order, or `None` if
/// there is none. The caller handles the endpoints 0 and 1. Fails with
/// [`Error::SuspectedMultipleRoot`] when a subinterval still may hold several roots at
/// depth `max_depth`; square-free inputs always separate eventually.
pub fn first_root_01(p: &IntPoly, order: SearchOrder, max_depth: usize) -> Result<Option<Isolated>> {
    let Some(d) = p.degree() else {
        return Err(Error::Precondition("zero polynomial has no isolated roots".into()));
    };
    if d == 0 {
        return Ok(None);
    }
    let mut stack = vec![Item::Node {
        k: 0,
        c: BigInt::zero(),
        q: p.coeffs.clone(),
    }];
    while let Some(item) = stack.pop() {
        let (k, c, q) = match item {
            Item::Point(x) => return Ok(Some(Isolated::Exact(x))),
            Item::Node { k, c, q } => (k, c, q),
        };
        let mut t: Vec<BigInt> = q.iter().rev().cloned().collect();
        taylor_shift_in_place(&mut t);
        let v = sign_variations(&t);
        if v == 0 {
            continue;
        }
        if v == 1 {
            return Ok(Some(Isolated::Interval(
                Dyadic::new(c.clone(), k),
                Dyadic::new(c + 1u32, k),
            )));
        }
        if k >= max_depth {
            return Err(Error::SuspectedMultipleRoot {
                near: format!("{}", dyadic(c, k)),
            });
        }
        // left child 2^deg q(x/2), right child its shift by one
        let dq = q.len() - 1;
        let mut left: Vec<BigInt> = q
            .iter()
            .enumerate()
            .map(|(i, a)| a << (dq - i))
            .collect();
        drop_common_twos(&mut left);
        let mut right = left.clone();
        taylor_shift_in_place(&mut right);
        let c2 = &c << 1usize;
        let mid_is_root = right[0].is_zero();
        if mid_is_root {
            right.remove(0);
        }
        let left = Item::Node {
            k: k + 1,
            c: c2.clone(),
            q: left,
        };
        let right_node = Item::Node {
            k: k + 1,
            c: &c2 + 1u32,
            q: right,
        };
        let mid = mid_is_root.then(|| Item::Point(Dyadic::new(&c2 + 1u32, k + 1)));
        match order {
            SearchOrder::LeftFirst => {
                stack.push(right_node);
                stack.extend(mid);
                stack.push(left);
            }
            SearchOrder::RightFirst => {
                stack.push(left);
                stack.extend(mid);
                stack.push(right_node);
            }
        }
    }
    Ok(None)
}

/// Shrinks an isolating interval of `p` by exact bisection until its width is at most
/// `2^{-bits}`. Returns `Exact` if a bisection point hits the root.
pub fn refine_by_bisection(p: &IntPoly, iso: &Isolated, bits: usize, max_steps: usize) -> Result<Isolated> {
    let (mut lo, mut hi) = match iso {
        Isolated::Exact(_) => return Ok(iso.clone()),
        Isolated::Interval(lo, hi) => (lo.clone(), hi.clone()),
    };
    let s_lo = p.sign_at(&lo);
    let s_hi = p.sign_at(&hi);
    // one nonzero reference sign suffices: the open interval holds exactly one simple root
    let (reference, from_left) = match (s_lo, s_hi) {
        (0, 0) => {
            return Err(Error::Precondition(
                "isolating interval with roots at both ends".into(),
            ))
        }
        (0, s) => (s, false),
        (s, _) => (s, true),
    };
    let mut steps = 0;
    while lo.k < bits {
        if steps >= max_steps {
            return Err(Error::ToleranceNotReached {
                tol: 2f64.powi(-(bits as i32)),
                iterations: steps,
            });
        }
        steps += 1;
        let k = lo.k + 1;
        let mid = Dyadic::new(&lo.m + &lo.m + 1u32, k);
        let (l2, h2) = (lo.rescale(k), hi.rescale(k));
        let s = p.sign_at(&mid);
        if s == 0 {
            return Ok(Isolated::Exact(mid));
        }
        let root_right_of_mid = if from_left { s == reference } else { s != reference };
        if root_right_of_mid {
            lo = mid;
            hi = h2;
        } else {
            lo = l2;
            hi = mid;
        }
    }
    Ok(Isolated::Interval(lo, hi))
}

/// Newton iteration in fixed point with `precision` fractional bits, started at the
/// midpoint of the isolating interval. The result is accepted only if two exact sign
/// evaluations bracket the root in a subinterval of width `2^{1 - bits}`.
pub fn refine_by_newton(p: &IntPoly, iso: &Isolated, bits: usize, precision: usize) -> Option<Isolated> {
    let (lo, hi) = match iso {
        Isolated::Exact(_) => return Some(iso.clone()),
        Isolated::Interval(lo, hi) => (lo, hi),
    };
    if precision < bits + 8 || lo.k > precision {
        return None;
    }
    let dp = p.derivative();
    let lo_f = &lo.m << (precision - lo.k);
    let hi_f = &hi.m << (precision - hi.k);
    let mut x: BigInt = (&lo_f + &hi_f) >> 1usize;
    let tolerance = BigInt::one() << 4usize;
    for _ in 0..(2 * usize::BITS as usize) {
        let fx = fixed_eval(p, &x, precision);
        let dfx = fixed_eval(&dp, &x, precision);
        if dfx.is_zero() {
            return None;
        }
        let step = (fx << precision) / dfx;
        x -= &step;
        if x < lo_f || x > hi_f {
            return None;
        }
        if step.abs() <= tolerance {
            break;
        }
    }
    // certify on the grid of width 2^{-bits}
    let center = &x >> (precision - bits);
    let mid = Dyadic::new(center.clone(), bits);
    if p.sign_at(&mid) == 0 {
        return Some(Isolated::Exact(mid));
    }
    let a = Dyadic::new(&center - 1u32, bits);
    let b = Dyadic::new(&center + 1u32, bits);
    if a.to_rational() < lo.to_rational() || b.to_rational() > hi.to_rational() {
        return None;
    }
    let (sa, sb) = (p.sign_at(&a), p.sign_at(&b));
    if sa == 0 {
        return Some(Isolated::Exact(a));
    }
    if sb == 0 {
        return Some(Isolated::Exact(b));
    }
    (sa != sb).then_some(Isolated::Interval(a, b))
}

fn fixed_eval(p: &IntPoly, x: &BigInt, precision: usize) -> BigInt {
    p.coeffs()
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| ((acc * x) >> precision) + (c << precision))
}

/// Characteristic polynomial `det(x I - A)` by the Faddeev–LeVerrier recursion; exact for
/// integer matrices.
pub fn characteristic_polynomial(a: &[Vec<BigInt>]) -> IntPoly {
    let n = a.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // m ← A m + c_{n-k+1} I
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let trace: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / BigInt::from(k);
    }
    IntPoly::new(coeffs)
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for (l, ail) in a[i].iter().enumerate() {
            if ail.is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[l][j].is_zero() {
                    out[i][j] += ail * &b[l][j];
                }
            }
        }
    }
    out
}

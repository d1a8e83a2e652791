//! Open dynamics of the doubling map with the hole `H = (θ, 1 - θ)`.
//!
//! The survivor set `K(θ) = {x : D^n(x) ∉ H for all n >= 0}` is coded by a Markov
//! partition whose breakpoints are `0, 1, θ, 1 - θ` and the orbits of `θ` and `1 - θ`.
//! Its transition matrix has Perron root `λ` and `dim K(θ) = log λ / log 2`. Nothing here
//! touches kneading series, so the dimension is an independent check of `h(θ) / log 2`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::angles::BinaryAngle;
use crate::error::{Error, Result};
use crate::numeric::{bits_for_tolerance, ln1p_interval, to_f64_down, to_f64_up, widen};
use crate::poly::{characteristic_polynomial, first_root_01, refine_by_bisection, Isolated, SearchOrder};

/// Largest `n` for counting through the automaton.
pub const AUTOMATON_COUNT_CAP: usize = 40;
/// Largest `n` for naive enumeration of all `2^n` cylinders.
pub const NAIVE_COUNT_CAP: usize = 24;
/// Matrices up to this size get the exact characteristic-polynomial treatment.
pub const CHARPOLY_MAX_STATES: usize = 64;

/// Whether the hole test starts at `n = 0` (the set `K(θ)`) or at `n = 1` (the larger set
/// whose image is `K(θ)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoleStart {
    Zero,
    One,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivorAutomaton {
    pub theta: BinaryAngle,
    pub hole: (BigRational, BigRational),
    /// Closed intervals of the partition; the states of the automaton.
    pub intervals: Vec<(BigRational, BigRational)>,
    /// States lying inside the hole (only present for [`HoleStart::One`]).
    pub in_hole: Vec<bool>,
    /// `matrix[i][j] = 1` iff interval `j` lies in the image of interval `i`.
    pub matrix: Vec<Vec<u8>>,
    pub start: HoleStart,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn check_theta(theta: &BinaryAngle) -> Result<()> {
    if !theta.value().is_positive() || theta.value() > &half() {
        return Err(Error::out_of_range(theta.to_fraction_string(), "(0, 1/2]"));
    }
    Ok(())
}

fn image(l: &BigRational, r: &BigRational) -> (BigRational, BigRational) {
    let two = BigInt::from(2);
    if r <= &half() {
        (l * &two, r * &two)
    } else {
        (l * &two - BigInt::one(), r * &two - BigInt::one())
    }
}

/// `0, 1/2, 1, θ, 1 - θ` and both endpoint orbits, sorted without repetitions. The set is
/// mapped into itself by both branches `x ↦ 2x` and `x ↦ 2x - 1`.
fn breakpoints(theta: &BinaryAngle) -> Result<Vec<BigRational>> {
    check_theta(theta)?;
    let x = theta.value().clone();
    let y = BigRational::one() - &x;
    let mut points = vec![BigRational::zero(), half(), BigRational::one(), x, y];
    points.extend(theta.orbit().into_iter().map(|a| a.value().clone()));
    points.extend(theta.complement().orbit().into_iter().map(|a| a.value().clone()));
    points.sort();
    points.dedup();
    Ok(points)
}

pub fn build_automaton(theta: &BinaryAngle) -> Result<SurvivorAutomaton> {
    build_automaton_with(theta, HoleStart::Zero)
}

pub fn build_automaton_with(theta: &BinaryAngle, start: HoleStart) -> Result<SurvivorAutomaton> {
    let points = breakpoints(theta)?;
    let x = theta.value().clone();
    let y = BigRational::one() - &x;

    let mut intervals = Vec::new();
    let mut in_hole = Vec::new();
    for w in points.windows(2) {
        let hole = w[0] >= x && w[1] <= y;
        if hole && start == HoleStart::Zero {
            continue;
        }
        intervals.push((w[0].clone(), w[1].clone()));
        in_hole.push(hole);
    }

    let n = intervals.len();
    let mut matrix = vec![vec![0u8; n]; n];
    for (i, (l, r)) in intervals.iter().enumerate() {
        if l < &half() && r > &half() {
            return Err(Error::MarkovViolation(format!("state [{l}, {r}] straddles 1/2")));
        }
        let (a, b) = image(l, r);
        if points.binary_search(&a).is_err() || points.binary_search(&b).is_err() {
            return Err(Error::MarkovViolation(format!(
                "image [{a}, {b}] of [{l}, {r}] does not end on breakpoints"
            )));
        }
        for (j, (l2, r2)) in intervals.iter().enumerate() {
            if !in_hole[j] && &a <= l2 && r2 <= &b {
                matrix[i][j] = 1;
            }
        }
    }
    Ok(SurvivorAutomaton {
        theta: theta.clone(),
        hole: (x, y),
        intervals,
        in_hole,
        matrix,
        start,
    })
}

impl SurvivorAutomaton {
    pub fn states(&self) -> usize {
        self.intervals.len()
    }

    /// Plain-text adjacency list with exact endpoints.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, (l, r)) in self.intervals.iter().enumerate() {
            let succ: Vec<String> = (0..self.states())
                .filter(|&j| self.matrix[i][j] == 1)
                .map(|j| j.to_string())
                .collect();
            let tag = if self.in_hole[i] { " hole" } else { "" };
            writeln!(out, "{i} [{l}, {r}]{tag} -> {}", succ.join(" ")).expect("writing to a string");
        }
        out
    }
}

/// Certified enclosure of the Perron root.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronRoot {
    pub lo: BigRational,
    pub hi: BigRational,
    /// Whether the characteristic polynomial was used (otherwise power iteration).
    pub exact_method: bool,
}

/// Perron root of a 0/1 matrix to width `tol`: characteristic polynomial for small
/// matrices, Collatz–Wielandt bounds per strongly connected component above that.
pub fn perron_root(matrix: &[Vec<u8>], tol: f64) -> Result<PerronRoot> {
    if matrix.len() <= CHARPOLY_MAX_STATES {
        perron_by_charpoly(matrix, tol)
    } else {
        perron_by_power_iteration(matrix, tol, 100_000)
    }
}

/// Largest real root of the characteristic polynomial, isolated in `[1, 2]`.
pub fn perron_by_charpoly(matrix: &[Vec<u8>], tol: f64) -> Result<PerronRoot> {
    let a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let chi = characteristic_polynomial(&a).square_free();
    let exact = |v: i64| -> PerronRoot {
        let r = BigRational::from_integer(BigInt::from(v));
        PerronRoot { lo: r.clone(), hi: r, exact_method: true }
    };
    // no root beyond 2: Descartes on χ(x + 2)
    let beyond = chi.taylor_shift_one().taylor_shift_one();
    if sign_changes(beyond.coeffs()) != 0 && !beyond.coeff(0).is_zero() {
        return Err(Error::NoConvergence("characteristic polynomial may have a root above 2".into()));
    }
    if beyond.coeff(0).is_zero() {
        return Ok(exact(2));
    }
    let shifted = chi.taylor_shift_one();
    let bits = bits_for_tolerance(tol) + 2;
    if let Some(iso) = first_root_01(&shifted, SearchOrder::RightFirst, 512)? {
        let (lo, hi) = match refine_by_bisection(&shifted, &iso, bits, 10_000)? {
            Isolated::Exact(x) => (x.to_rational(), x.to_rational()),
            Isolated::Interval(l, h) => (l.to_rational(), h.to_rational()),
        };
        let one = BigRational::one();
        return Ok(PerronRoot {
            lo: lo + &one,
            hi: hi + one,
            exact_method: true,
        });
    }
    if shifted.coeff(0).is_zero() {
        return Ok(exact(1));
    }
    Err(Error::NoConvergence("no eigenvalue in [1, 2]".into()))
}

fn sign_changes(c: &[BigInt]) -> usize {
    let signs: Vec<bool> = c.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Power iteration on `B = A_s + I` for every nontrivial component `s`; the floating
/// eigenvector is turned into exact rationals and the Collatz–Wielandt quotients
/// `min (Bv)_i / v_i <= ρ(B) <= max (Bv)_i / v_i` are evaluated exactly.
pub fn perron_by_power_iteration(matrix: &[Vec<u8>], tol: f64, max_iter: usize) -> Result<PerronRoot> {
    let n = matrix.len();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if matrix[i][j] == 1 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut best_lo = BigRational::zero();
    let mut best_hi = BigRational::zero();
    for comp in tarjan_scc(&g) {
        let idx: Vec<usize> = comp.iter().map(|v| v.index()).collect();
        let nontrivial = idx.len() > 1 || matrix[idx[0]][idx[0]] == 1;
        if !nontrivial {
            continue;
        }
        let (lo, hi) = component_bounds(matrix, &idx, tol, max_iter)?;
        if lo > best_lo {
            best_lo = lo;
        }
        if hi > best_hi {
            best_hi = hi;
        }
    }
    if best_hi.is_zero() {
        return Ok(PerronRoot { lo: best_lo, hi: best_hi, exact_method: false });
    }
    Ok(PerronRoot { lo: best_lo, hi: best_hi, exact_method: false })
}

fn component_bounds(matrix: &[Vec<u8>], idx: &[usize], tol: f64, max_iter: usize) -> Result<(BigRational, BigRational)> {
    let m = idx.len();
    let sub: Vec<Vec<u8>> = idx.iter().map(|&i| idx.iter().map(|&j| matrix[i][j]).collect()).collect();
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| v[i] + (0..m).filter(|&j| sub[i][j] == 1).map(|j| v[j]).sum::<f64>())
            .collect()
    };
    let mut v = vec![1.0f64; m];
    for it in 0..max_iter {
        let w = apply(&v);
        let norm = w.iter().cloned().fold(0.0, f64::max);
        v = w.iter().map(|x| x / norm).collect();
        if it % 16 != 15 {
            continue;
        }
        let exact: Vec<BigRational> = v
            .iter()
            .map(|&x| BigRational::from_float(x).expect("finite iterate"))
            .collect();
        if exact.iter().any(|x| !x.is_positive()) {
            continue;
        }
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for i in 0..m {
            let bv: BigRational = &exact[i]
                + (0..m)
                    .filter(|&j| sub[i][j] == 1)
                    .map(|j| exact[j].clone())
                    .fold(BigRational::zero(), |a, b| a + b);
            let q = bv / &exact[i];
            lo = Some(lo.map_or(q.clone(), |l| l.min(q.clone())));
            hi = Some(hi.map_or(q.clone(), |h| h.max(q)));
        }
        let (lo, hi) = (lo.expect("nonempty") - BigInt::one(), hi.expect("nonempty") - BigInt::one());
        if (&hi - &lo).to_f64().unwrap_or(f64::INFINITY) <= tol {
            return Ok((lo, hi));
        }
    }
    Err(Error::NoConvergence(format!("power iteration did not reach width {tol:e}")))
}

/// Dimension of `K(θ)` with the automaton it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionResult {
    pub theta: BinaryAngle,
    pub states: usize,
    pub lambda: PerronRoot,
    pub dimension_lo: f64,
    pub dimension_hi: f64,
}

impl DimensionResult {
    /// `{theta, states, lambda_lo, lambda_hi, dimension_lo, dimension_hi}`.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Record {
            theta: String,
            states: usize,
            lambda_lo: f64,
            lambda_hi: f64,
            dimension_lo: f64,
            dimension_hi: f64,
        }
        serde_json::to_value(Record {
            theta: self.theta.to_fraction_string(),
            states: self.states,
            lambda_lo: to_f64_down(&self.lambda.lo),
            lambda_hi: to_f64_up(&self.lambda.hi),
            dimension_lo: self.dimension_lo,
            dimension_hi: self.dimension_hi,
        })
        .expect("dimension record serializes")
    }

    pub fn dimension_mid(&self) -> f64 {
        0.5 * (self.dimension_lo + self.dimension_hi)
    }
}

/// Certified enclosure of `log λ / log 2`. `θ = 0` leaves only the fixed point and gets
/// dimension 0 without building an automaton.
pub fn dimension(theta: &BinaryAngle, tol: f64) -> Result<DimensionResult> {
    dimension_with(theta, tol, HoleStart::Zero)
}

pub fn dimension_with(theta: &BinaryAngle, tol: f64, start: HoleStart) -> Result<DimensionResult> {
    if theta.value().is_zero() {
        let one = BigRational::one();
        return Ok(DimensionResult {
            theta: theta.clone(),
            states: 0,
            lambda: PerronRoot { lo: one.clone(), hi: one, exact_method: true },
            dimension_lo: 0.0,
            dimension_hi: 0.0,
        });
    }
    let auto = build_automaton_with(theta, start)?;
    let lambda = perron_root(&auto.matrix, tol * 0.5)?;
    let one = BigRational::one();
    let (dimension_lo, dimension_hi) = if lambda.lo == one && lambda.hi == one {
        (0.0, 0.0)
    } else {
        let (a, b) = ln1p_interval(&(&lambda.lo - &one), &(&lambda.hi - &one));
        let (a, b) = widen(a / std::f64::consts::LN_2, b / std::f64::consts::LN_2);
        (a.max(0.0), b.min(1.0))
    };
    Ok(DimensionResult {
        theta: theta.clone(),
        states: auto.states(),
        lambda,
        dimension_lo,
        dimension_hi,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Automaton,
    Naive,
}

/// Number of closed depth-`n` binary cylinders that meet
/// `{x : D^k(x) ∉ (θ, 1 - θ), 0 <= k < n}`.
pub fn cylinder_count(theta: &BinaryAngle, n: usize, mode: CountMode) -> Result<u128> {
    if n == 0 {
        return Err(Error::Precondition("depth must be positive".into()));
    }
    match mode {
        CountMode::Automaton => count_by_automaton(theta, n),
        CountMode::Naive => count_naively(theta, n),
    }
}

/// A state of the counting automaton: an open partition interval or a breakpoint.
#[derive(Clone, Debug)]
enum CountState {
    Open(BigRational, BigRational),
    Point(BigRational),
}

/// Counting runs on a finer automaton than the Markov matrix: open intervals and the
/// breakpoints themselves, so that orbits through interval endpoints are followed exactly.
/// Each state emits the binary digit of the branch it is mapped by; the point `1/2` (and
/// only it) may emit either digit.
fn count_by_automaton(theta: &BinaryAngle, n: usize) -> Result<u128> {
    if n > AUTOMATON_COUNT_CAP {
        return Err(Error::CapExceeded { what: "automaton cylinder depth", cap: AUTOMATON_COUNT_CAP });
    }
    let points = breakpoints(theta)?;
    let (x, y) = (theta.value().clone(), BigRational::one() - theta.value());
    let h = half();
    let mut states = Vec::new();
    for w in points.windows(2) {
        if !(w[0] >= x && w[1] <= y) {
            states.push(CountState::Open(w[0].clone(), w[1].clone()));
        }
    }
    for p in &points {
        if !(&x < p && p < &y) {
            states.push(CountState::Point(p.clone()));
        }
    }
    let s = states.len();
    let two = BigInt::from(2);
    // edges[b][i] = successors of state i when it emits digit b
    let mut edges: [Vec<Vec<usize>>; 2] = [vec![Vec::new(); s], vec![Vec::new(); s]];
    for (i, st) in states.iter().enumerate() {
        for b in 0..2u8 {
            let image = match st {
                CountState::Open(l, r) => {
                    let side = u8::from(l >= &h);
                    if side != b {
                        continue;
                    }
                    CountState::Open(l * &two - BigInt::from(b), r * &two - BigInt::from(b))
                }
                CountState::Point(p) => {
                    let ok = if b == 0 { p <= &h } else { p >= &h };
                    if !ok {
                        continue;
                    }
                    CountState::Point(p * &two - BigInt::from(b))
                }
            };
            for (j, target) in states.iter().enumerate() {
                let hit = match (&image, target) {
                    (CountState::Open(a, c), CountState::Open(l, r)) => a <= l && r <= c,
                    (CountState::Open(a, c), CountState::Point(p)) => a < p && p < c,
                    (CountState::Point(q), CountState::Point(p)) => q == p,
                    (CountState::Point(_), CountState::Open(..)) => false,
                };
                if hit {
                    edges[b as usize][i].push(j);
                }
            }
        }
    }
    let emits = |set: &[bool], b: usize| -> bool {
        (0..s).any(|i| set[i] && states_emit(&states[i], b as u8, &h))
    };
    // sets of possible current states, merged over words with equal sets
    let mut frontier: BTreeMap<Vec<bool>, u128> = BTreeMap::new();
    frontier.insert(vec![true; s], 1);
    for _ in 1..n {
        let mut next: BTreeMap<Vec<bool>, u128> = BTreeMap::new();
        for (set, count) in frontier {
            for b in 0..2usize {
                let mut succ = vec![false; s];
                for i in (0..s).filter(|&i| set[i]) {
                    for &j in &edges[b][i] {
                        succ[j] = true;
                    }
                }
                if succ.iter().any(|&v| v) {
                    *next.entry(succ).or_default() += count;
                }
            }
        }
        frontier = next;
    }
    // the last digit only needs a state able to emit it
    Ok(frontier
        .iter()
        .map(|(set, count)| count * (0..2).filter(|&b| emits(set, b)).count() as u128)
        .sum())
}

fn states_emit(st: &CountState, b: u8, h: &BigRational) -> bool {
    match st {
        CountState::Open(l, _) => u8::from(l >= h) == b,
        CountState::Point(p) => {
            if b == 0 {
                p <= h
            } else {
                p >= h
            }
        }
    }
}

fn count_naively(theta: &BinaryAngle, n: usize) -> Result<u128> {
    if n > NAIVE_COUNT_CAP {
        return Err(Error::CapExceeded { what: "naive cylinder depth", cap: NAIVE_COUNT_CAP });
    }
    check_theta(theta)?;
    let (p, q) = match (theta.value().numer().to_i128(), theta.value().denom().to_i128()) {
        (Some(p), Some(q)) if q < (1i128 << 64) => (p, q),
        _ => return Err(Error::CapExceeded { what: "denominator bits for naive counting", cap: 64 }),
    };
    // positions scaled by 2^n q; cylinder j is [j q, (j + 1) q]
    let mut count = 0u128;
    let mut holes: Vec<(i128, i128)> = Vec::with_capacity(n);
    for j in 0..(1i128 << n) {
        holes.clear();
        for k in 0..n {
            let c = j >> (n - k);
            let scale = 1i128 << (n - k);
            holes.push((scale * (p + c * q), scale * (q - p + c * q)));
        }
        if !covered(&holes, j * q, (j + 1) * q) {
            count += 1;
        }
    }
    Ok(count)
}

/// Whether the open intervals cover the closed interval `[a, b]`.
fn covered(open: &[(i128, i128)], a: i128, b: i128) -> bool {
    let mut cur = a;
    loop {
        let reach = open
            .iter()
            .filter(|(l, r)| *l < cur && cur < *r)
            .map(|(_, r)| *r)
            .max();
        match reach {
            Some(r) if r > b => return true,
            Some(r) => cur = r,
            None => return false,
        }
    }
}

/// `C = max_n n |log2 N_n / n - η|` over `n = 1 … n_max`, with the per-depth rows.
pub fn counting_constant(theta: &BinaryAngle, n_max: usize, tol: f64) -> Result<(f64, Vec<(usize, u128, f64)>)> {
    let eta = dimension(theta, tol)?.dimension_mid();
    let mut rows = Vec::new();
    let mut c: f64 = 0.0;
    for n in 1..=n_max {
        let count = cylinder_count(theta, n, CountMode::Automaton)?;
        let rate = (count as f64).log2() / n as f64;
        c = c.max(n as f64 * (rate - eta).abs());
        rows.push((n, count, rate));
    }
    Ok((c, rows))
}

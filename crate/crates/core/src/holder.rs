//! Local Hölder exponent of `θ ↦ h(θ)` and the probes around it.
//!
//! [`local_exponent`] samples `θ' = θ ± 2^{-j}(1 + v_i)` with `v_i` the van der Corput
//! sequence, keeps the pairs whose certified entropy difference excludes 0 and fits the
//! slope of `log2|Δh|` against `log2|Δθ|` by ordinary least squares. The predicted value
//! is `h(θ) / log 2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::angles::{agreement_depth, BinaryAngle};
use crate::error::{Error, Result};
use crate::kneading::{entropy, entropy_difference, extended_entropy, Certificate, EntropyConfig, EntropyResult};
use crate::numeric::{dyadic, log2_abs, pow2, to_f64_down};
use crate::realset::{self, DEFAULT_PERIOD_CAP};

/// Largest Thue–Morse level accepted by [`thue_morse`].
pub const THUE_MORSE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Both,
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "both" => Ok(Side::Both),
            other => Err(Error::Parse(format!("side must be left, right or both, not {other:?}"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Both => "both",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderConfig {
    pub j_min: usize,
    pub j_max: usize,
    pub samples_per_scale: usize,
    pub side: Side,
    pub entropy: EntropyConfig,
}

impl Default for HolderConfig {
    fn default() -> Self {
        HolderConfig {
            j_min: 8,
            j_max: 48,
            samples_per_scale: 8,
            side: Side::Both,
            entropy: EntropyConfig::with_tol(1e-30),
        }
    }
}

/// One sampled pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub scale: usize,
    #[serde(skip)]
    pub theta_prime: BinaryAngle,
    /// `log2 |θ' - θ|`.
    pub log2_delta_theta: f64,
    pub delta_h_lo: f64,
    pub delta_h_hi: f64,
    pub used: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderEstimate {
    pub theta: BinaryAngle,
    pub exponent: f64,
    pub predicted: f64,
    /// Largest absolute deviation of the fitted line, in `log2` units.
    pub residual: f64,
    pub scale_window: (usize, usize),
    /// Pairs that entered the fit.
    pub sample_count: usize,
    pub side: Side,
    pub samples: Vec<Sample>,
}

impl HolderEstimate {
    /// `{theta, exponent, predicted, residual, window}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "theta": self.theta.to_fraction_string(),
            "exponent": self.exponent,
            "predicted": self.predicted,
            "residual": self.residual,
            "window": [self.scale_window.0, self.scale_window.1],
            "samples": self.sample_count,
            "side": self.side,
        })
    }

    /// CSV rows `scale,delta_theta,delta_h,used_flag`; `delta_theta` is `log2|Δθ|` and
    /// `delta_h` the midpoint of the certified difference.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,delta_theta,delta_h,used_flag\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.scale,
                s.log2_delta_theta,
                0.5 * (s.delta_h_lo + s.delta_h_hi),
                u8::from(s.used)
            ));
        }
        out
    }
}

/// `i`-th van der Corput point in base 2, as `m / 2^k`.
fn van_der_corput(mut i: usize) -> BigRational {
    let (mut num, mut k) = (0u64, 0usize);
    while i > 0 {
        num = (num << 1) | (i as u64 & 1);
        i >>= 1;
        k += 1;
    }
    dyadic(BigInt::from(num), k)
}

fn sample_offsets(j_min: usize, j_max: usize, per_scale: usize, side: Side) -> Vec<(usize, BigRational)> {
    let mut out = Vec::new();
    for j in j_min..=j_max {
        for i in 1..=per_scale {
            let off = dyadic(BigInt::one(), j) * (BigRational::one() + van_der_corput(i));
            if side != Side::Right {
                out.push((j, -off.clone()));
            }
            if side != Side::Left {
                out.push((j, off));
            }
        }
    }
    out
}

/// Slope, intercept and largest absolute residual of the least-squares line.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Some((slope, intercept, residual))
}

/// Regression estimate of the local exponent at `θ`.
pub fn local_exponent(theta: &BinaryAngle, cfg: &HolderConfig) -> Result<HolderEstimate> {
    if cfg.j_min < 2 || cfg.j_min >= cfg.j_max {
        return Err(Error::Precondition(format!(
            "scale window needs 2 <= j_min < j_max, got {}..{}",
            cfg.j_min, cfg.j_max
        )));
    }
    if cfg.samples_per_scale == 0 {
        return Err(Error::Precondition("samples_per_scale must be positive".into()));
    }
    let base = extended_entropy(theta, &cfg.entropy)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let offsets: Vec<(usize, BigRational)> = sample_offsets(cfg.j_min, cfg.j_max, cfg.samples_per_scale, cfg.side)
        .into_iter()
        .filter(|(_, off)| {
            let y = theta.value() + off;
            !y.is_negative() && y <= half
        })
        .collect();
    let samples: Vec<Sample> = offsets
        .par_iter()
        .map(|(j, off)| -> Result<Sample> {
            let tp = BinaryAngle::from_ratio(theta.value() + off)?;
            let other = extended_entropy(&tp, &cfg.entropy)?;
            let (lo, hi) = entropy_difference(&base, &other);
            Ok(Sample {
                scale: *j,
                theta_prime: tp,
                log2_delta_theta: log2_abs(off),
                delta_h_lo: lo,
                delta_h_hi: hi,
                used: lo > 0.0 || hi < 0.0,
            })
        })
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.used)
        .map(|s| (s.log2_delta_theta, (0.5 * (s.delta_h_lo + s.delta_h_hi)).abs().log2()))
        .collect();
    if points.is_empty() {
        return Err(Error::Plateau);
    }
    let (slope, _, residual) = least_squares(&points)
        .ok_or_else(|| Error::NoConvergence("fewer than two usable scales".into()))?;
    Ok(HolderEstimate {
        theta: theta.clone(),
        exponent: slope,
        predicted: base.entropy_mid() / std::f64::consts::LN_2,
        residual,
        scale_window: (cfg.j_min, cfg.j_max),
        sample_count: points.len(),
        side: cfg.side,
        samples,
    })
}

/// Empirical constant of the upper bound `|Δh| <= C |Δθ|^{h(θ)/log 2}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperProbe {
    pub c_hat: f64,
    /// `(θ', |Δh| / |Δθ|^α)` ordered by decreasing distance.
    pub ratios: Vec<(String, f64)>,
    pub holds: bool,
}

/// Computes `C_hat = max |Δh| / |Δθ|^α`. It counts as stable when the pairs in the closer
/// half never exceed twice the largest ratio of the farther half.
pub fn upper_bound_probe(theta: &BinaryAngle, pairs: &[BinaryAngle], cfg: &EntropyConfig) -> Result<UpperProbe> {
    let base = entropy(theta, cfg)?;
    let alpha = base.entropy_mid() / std::f64::consts::LN_2;
    let mut rows: Vec<(BigRational, String, f64)> = pairs
        .par_iter()
        .map(|tp| -> Result<(BigRational, String, f64)> {
            let other = extended_entropy(tp, cfg)?;
            let (lo, hi) = entropy_difference(&base, &other);
            let dh = lo.abs().max(hi.abs());
            let dist = (theta.value() - tp.value()).abs();
            if dist.is_zero() {
                return Err(Error::EqualAngles);
            }
            let ratio = if dh == 0.0 {
                0.0
            } else {
                (dh.log2() - alpha * log2_abs(&dist)).exp2()
            };
            Ok((dist, tp.to_fraction_string(), ratio))
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| b.0.cmp(&a.0));
    let c_hat = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let far = rows.len().div_ceil(2);
    let far_max = rows[..far].iter().map(|r| r.2).fold(0.0, f64::max);
    let near_max = rows[far..].iter().map(|r| r.2).fold(0.0, f64::max);
    let holds = c_hat.is_finite() && (rows.len() < 2 || near_max <= 2.0 * far_max);
    Ok(UpperProbe {
        c_hat,
        ratios: rows.into_iter().map(|(_, s, r)| (s, r)).collect(),
        holds,
    })
}

/// Pairs approaching `θ` from below inside ℛ: `(2^k - 1)/(2^{k+1} - 1)` for `θ = 1/2`,
/// the approximants `θ_m` otherwise.
pub fn default_upper_pairs(theta: &BinaryAngle, count: usize) -> Result<Vec<BinaryAngle>> {
    if theta.value() == &BigRational::new(BigInt::one(), BigInt::from(2)) {
        return (1..=count)
            .map(|k| BinaryAngle::from_fraction(pow2(k) - 1u32, pow2(k + 1) - 1u32))
            .collect();
    }
    let tp = realset::approximant_below(theta, None, DEFAULT_PERIOD_CAP)?;
    (1..=count)
        .map(|m| realset::approximant_sequence(theta, &tp, m))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerRow {
    pub m: usize,
    pub theta_m: String,
    /// `m P` with `P = p q`.
    pub common_digits: usize,
    /// `|θ - θ_m| <= 2^{-mP}`, checked exactly.
    pub distance_ok: bool,
    pub log2_distance: f64,
    /// Certified lower bound of `r_m - r`.
    pub root_gap_lo: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerProbe {
    pub theta: String,
    pub theta_prime: String,
    pub rows: Vec<LowerRow>,
    pub c_hat: f64,
    /// `None` for a single `m`: one ratio says nothing about the trend.
    pub holds: Option<bool>,
}

/// `c_hat = min_m (r_m - r) / |θ - θ_m|^α` along `θ_m = .(s^{mq} t)`, built from the
/// approximant `θ' = .(t)` of period `q`. Repeating `s` `m q` times keeps the first
/// `m p q` digits of `θ`.
pub fn lower_bound_probe(theta: &BinaryAngle, m_max: usize, cfg: &EntropyConfig) -> Result<LowerProbe> {
    if m_max == 0 {
        return Err(Error::Precondition("m_max must be positive".into()));
    }
    let class = realset::is_real_angle(theta)?;
    if !class.primitive {
        return Err(Error::Precondition(format!(
            "{} is not a primitive real angle",
            theta.to_fraction_string()
        )));
    }
    let base = entropy(theta, cfg)?;
    if base.certificate != Certificate::Root {
        return Err(Error::Precondition("lower bound probe needs positive entropy".into()));
    }
    let alpha = base.entropy_mid() / std::f64::consts::LN_2;
    let tp = realset::approximant_below(theta, None, DEFAULT_PERIOD_CAP)?;
    let (p, q) = (theta.period().len(), tp.period().len());
    let rows: Vec<LowerRow> = (1..=m_max)
        .into_par_iter()
        .map(|m| -> Result<LowerRow> {
            let tm = realset::approximant_sequence(theta, &tp, m * q)?;
            let dist = (theta.value() - tm.value()).abs();
            let common = m * p * q;
            let distance_ok = dist <= dyadic(BigInt::one(), common) && agreement_depth(theta, &tm)? > common;
            let em = entropy(&tm, cfg)?;
            let gap = &em.r_lo - &base.r_hi;
            let (root_gap_lo, ratio) = if gap.is_positive() {
                let lg = log2_abs(&gap);
                (to_f64_down(&gap), (lg - alpha * log2_abs(&dist)).exp2())
            } else {
                (0.0, 0.0)
            };
            Ok(LowerRow {
                m,
                theta_m: tm.to_fraction_string(),
                common_digits: common,
                distance_ok,
                log2_distance: log2_abs(&dist),
                root_gap_lo,
                ratio,
            })
        })
        .collect::<Result<_>>()?;
    if rows.iter().all(|r| r.ratio == 0.0) {
        return Err(Error::Plateau);
    }
    let c_hat = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let holds = (m_max >= 2).then(|| {
        let split = m_max / 2;
        let early = rows[..split].iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let late = rows[split..].iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        c_hat > 0.0 && late >= 0.25 * early && rows.iter().all(|r| r.distance_ok)
    });
    Ok(LowerProbe {
        theta: theta.to_fraction_string(),
        theta_prime: tp.to_fraction_string(),
        rows,
        c_hat,
        holds,
    })
}

/// Thue–Morse block `S_n`: `S_0 = 0`, `S_{n+1} = S_n Š_n`.
pub fn thue_morse(n: usize) -> Result<Vec<u8>> {
    if n > THUE_MORSE_CAP {
        return Err(Error::CapExceeded {
            what: "Thue-Morse level",
            cap: THUE_MORSE_CAP,
        });
    }
    let mut s = vec![0u8];
    for _ in 0..n {
        let comp: Vec<u8> = s.iter().map(|b| 1 - b).collect();
        s.extend(comp);
    }
    Ok(s)
}

/// One level of the ladder towards the Feigenbaum angle `θ⋆ = .S_∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeigenbaumRung {
    pub n: usize,
    pub block: Vec<u8>,
    /// `.(S_n)`.
    pub eta: BinaryAngle,
    /// `.S_n (Š_n)`.
    pub theta: BinaryAngle,
    pub entropy: EntropyResult,
    /// Enclosure of `log2 |θ_n - θ⋆|`.
    pub log2_gap: (f64, f64),
    /// Enclosure of `h(θ_n) · (-log |θ_n - θ⋆|)`.
    pub modulus_product: (f64, f64),
}

impl FeigenbaumRung {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "eta": self.eta.to_fraction_string(),
            "theta": self.theta.to_fraction_string(),
            "entropy_lo": self.entropy.entropy_lo,
            "entropy_hi": self.entropy.entropy_hi,
            "scaled_entropy": [self.entropy.entropy_lo * (1u64 << self.n) as f64, self.entropy.entropy_hi * (1u64 << self.n) as f64],
            "log2_gap": [self.log2_gap.0, self.log2_gap.1],
            "modulus_product": [self.modulus_product.0, self.modulus_product.1],
        })
    }
}

/// Enclosure `[lo, hi]` of `θ⋆` from the Thue–Morse prefix `S_level`.
pub fn feigenbaum_bracket(level: usize) -> Result<(BinaryAngle, BinaryAngle)> {
    let s = thue_morse(level)?;
    Ok((BinaryAngle::from_digits(&s, &[0])?, BinaryAngle::from_digits(&s, &[1])?))
}

/// Levels `0 … n_max` of the ladder, with entropies certified to `tol`.
pub fn feigenbaum_ladder(n_max: usize, tol: f64) -> Result<Vec<FeigenbaumRung>> {
    // θ⋆ is pinned by a prefix much longer than the 3·2^n digits it shares with θ_n
    let level = n_max + 4;
    if level > THUE_MORSE_CAP {
        return Err(Error::CapExceeded {
            what: "Feigenbaum ladder level",
            cap: THUE_MORSE_CAP - 4,
        });
    }
    let (star_lo, star_hi) = feigenbaum_bracket(level)?;
    let cfg = EntropyConfig::with_tol(tol);
    (0..=n_max)
        .into_par_iter()
        .map(|n| -> Result<FeigenbaumRung> {
            let block = thue_morse(n)?;
            let comp: Vec<u8> = block.iter().map(|b| 1 - b).collect();
            let eta = BinaryAngle::periodic(&block)?;
            let theta = BinaryAngle::from_digits(&block, &comp)?;
            let entropy = entropy(&theta, &cfg)?;
            let d1 = (theta.value() - star_lo.value()).abs();
            let d2 = (theta.value() - star_hi.value()).abs();
            let (near, far) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            let inside = star_lo.value() <= theta.value() && theta.value() <= star_hi.value();
            if inside {
                return Err(Error::Precondition("Thue-Morse bracket too coarse".into()));
            }
            let log2_gap = (log2_abs(&near) - 1e-12, log2_abs(&far) + 1e-12);
            let ln2 = std::f64::consts::LN_2;
            let modulus_product = (
                entropy.entropy_lo * (-log2_gap.1 * ln2),
                entropy.entropy_hi * (-log2_gap.0 * ln2),
            );
            Ok(FeigenbaumRung {
                n,
                block,
                eta,
                theta,
                entropy,
                log2_gap,
                modulus_product,
            })
        })
        .collect()
}

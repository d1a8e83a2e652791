//! Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

mod common;

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{a, corpus, spread};
use unimodal_entropy::angles::{distance_bounds_check, BinaryAngle};
use unimodal_entropy::cli::{self, OutputFormat, ScanConfig, ScanMode};
use unimodal_entropy::holder::{self, HolderConfig, Side};
use unimodal_entropy::kneading::{self, Certificate, EntropyConfig};
use unimodal_entropy::opendyn::{self, CountMode};
use unimodal_entropy::realset;

const LN2: f64 = std::f64::consts::LN_2;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn cfg() -> EntropyConfig {
    EntropyConfig::with_tol(1e-13)
}

fn c1_anchors() -> Outcome {
    let start = Instant::now();
    let half = kneading::entropy(&a("1/2"), &cfg()).unwrap();
    let mut ok = (half.entropy_mid() - LN2).abs() <= 1e-10;
    for s in ["0", "1/3", "2/5"] {
        let r = kneading::entropy(&a(s), &cfg()).unwrap();
        ok &= r.certificate == Certificate::NoRoot && r.entropy_lo == 0.0 && r.entropy_hi == 0.0;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 1.0, format!("h(1/2) = {:.15}, zeros certified, {secs:.3} s", half.entropy_mid()))
}

fn c2_golden() -> Outcome {
    // smallest root of 1 - t - t^2
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let expect = -r.ln();
    let got = kneading::entropy(&a("3/7"), &cfg()).unwrap();
    let err = (got.entropy_mid() - expect).abs();
    outcome(err <= 1e-10, format!("h(3/7) = {:.15}, |err| = {err:.1e}", got.entropy_mid()))
}

fn c3_period_doubling() -> Outcome {
    let members: Vec<BinaryAngle> = corpus(12).into_iter().filter(|t| t.period().len() >= 2).collect();
    let mut checked = 0;
    let mut worst = 0f64;
    let mut identity_ok = true;
    for theta in &members {
        identity_ok &= kneading::pd_identity_check(theta).unwrap();
        let pd = realset::period_doubling(theta).unwrap();
        let h = kneading::entropy(theta, &cfg()).unwrap();
        let hp = kneading::entropy(&pd, &cfg()).unwrap();
        worst = worst.max((h.entropy_mid() - hp.entropy_mid()).abs());
        checked += 1;
    }
    outcome(
        checked >= 20 && identity_ok && worst <= 2e-12,
        format!("{checked} angles, identity {identity_ok}, max |h(pd) - h| = {worst:.1e}"),
    )
}

fn c4_simplicity() -> Outcome {
    let mut roots = 0;
    let mut min_lb = f64::INFINITY;
    for theta in corpus(12) {
        let r = kneading::entropy(&theta, &cfg()).unwrap();
        if r.certificate == Certificate::Root {
            roots += 1;
            min_lb = min_lb.min(r.derivative_lb.unwrap());
        }
    }
    outcome(min_lb > 1e-6, format!("{roots} roots, min |P'| lower bound = {min_lb:.3e}"))
}

fn c5_monotone_scan() -> Outcome {
    let start = Instant::now();
    let cfg = ScanConfig {
        angles: cli::grid(&a("0"), &a("1/2"), 12).unwrap(),
        tol: 1e-12,
        mode: ScanMode::Entropy,
        output: OutputFormat::Csv,
        jobs: 0,
    };
    let rows = cli::run_scan(&cfg, 128).unwrap();
    let mut running_lo = 0f64;
    let mut violations = 0;
    for r in &rows {
        let (lo, hi) = r.entropy.expect("row certified");
        if hi < running_lo {
            violations += 1;
        }
        running_lo = running_lo.max(lo);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations == 0 && rows.len() == 2049 && secs < 60.0,
        format!("{} rows, {violations} violations, {secs:.1} s", rows.len()),
    )
}

fn c6_oracle() -> Outcome {
    let angles = spread(10, 30);
    let mut worst = 0f64;
    let mut counts_ok = true;
    for theta in &angles {
        let h = kneading::entropy(theta, &cfg()).unwrap().entropy_mid();
        let eta = opendyn::dimension(theta, 1e-12).unwrap().dimension_mid();
        worst = worst.max((eta - h / LN2).abs());
        for n in 1..=16 {
            let fast = opendyn::cylinder_count(theta, n, CountMode::Automaton).unwrap();
            let slow = opendyn::cylinder_count(theta, n, CountMode::Naive).unwrap();
            counts_ok &= fast == slow;
        }
    }
    outcome(
        worst <= 1e-8 && counts_ok,
        format!("{} angles, max |eta - h/log 2| = {worst:.1e}, counts agree {counts_ok}", angles.len()),
    )
}

fn c7_holder() -> Outcome {
    let start = Instant::now();
    let run = |s: &str, side: Side| {
        let cfg = HolderConfig { side, ..HolderConfig::default() };
        holder::local_exponent(&a(s), &cfg).unwrap().exponent
    };
    // the left side of 25/56 lies in the small copy of 3/7, where h is flat
    let e_half = run("1/2", Side::Both);
    let e_tip = run("25/56", Side::Right);
    let e_33 = run("33/80", Side::Both);
    let ok = (0.9..=1.1).contains(&e_half) && (0.64..=0.75).contains(&e_tip) && (0.2..=0.3).contains(&e_33);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        ok && secs < 300.0,
        format!("1/2: {e_half:.4}, 25/56 (right): {e_tip:.4}, 33/80: {e_33:.4}, {secs:.1} s"),
    )
}

fn c8_lower_probe() -> Outcome {
    let probe = holder::lower_bound_probe(&a("3/7"), 6, &EntropyConfig::with_tol(1e-40)).unwrap();
    let distances = probe.rows.iter().all(|r| r.distance_ok);
    let positive = probe.rows.iter().all(|r| r.ratio > 0.0);
    outcome(
        probe.c_hat > 0.0 && positive && distances && probe.holds == Some(true),
        format!("c_hat = {:.5}, {} rows, distances exact {distances}", probe.c_hat, probe.rows.len()),
    )
}

fn c9_feigenbaum() -> Vec<(String, Outcome)> {
    let ladder = holder::feigenbaum_ladder(8, 1e-13).unwrap();
    let scaled_err = ladder
        .iter()
        .map(|r| (r.entropy.entropy_mid() * (1u64 << r.n) as f64 - LN2).abs())
        .fold(0f64, f64::max);
    let tail: Vec<_> = ladder.iter().filter(|r| r.n >= 2).collect();
    // log2 of |θ_n - θ⋆| / 2^{-2^n}
    let ratios: Vec<f64> = tail.iter().map(|r| 0.5 * (r.log2_gap.0 + r.log2_gap.1) + (1u64 << r.n) as f64).collect();
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max) - ratios.iter().cloned().fold(f64::MAX, f64::min);
    let products: Vec<f64> = tail.iter().map(|r| 0.5 * (r.modulus_product.0 + r.modulus_product.1)).collect();
    let in_band = tail.iter().all(|r| r.modulus_product.0 >= 0.2 && r.modulus_product.1 <= 1.2);
    let exponents: Vec<f64> = tail.iter().map(|r| -0.5 * (r.log2_gap.0 + r.log2_gap.1) / (1u64 << r.n) as f64).collect();
    let last = *exponents.last().unwrap();
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ");
    vec![
        (
            "9a".into(),
            outcome(scaled_err <= 1e-9, format!("max |h(θ_n) 2^n - log 2| = {scaled_err:.1e} for n <= 8")),
        ),
        (
            "9b".into(),
            outcome(spread <= 4.0, format!("log2(|θ_n - θ⋆| 2^(2^n)) spans {spread:.1} (factor 4 per side allows 4.0)")),
        ),
        (
            "9c".into(),
            outcome(in_band, format!("modulus product n = 2..8: [{}], band [0.2, 1.2]", fmt(&products))),
        ),
        (
            "9 (info)".into(),
            outcome(
                (last - 3.0).abs() < 0.05 && (products.last().unwrap() - 3.0 * LN2 * LN2).abs() < 0.05,
                format!("-log2|θ_n - θ⋆| / 2^n = [{}] -> 3, product -> 3 (log 2)^2 = {:.3}", fmt(&exponents), 3.0 * LN2 * LN2),
            ),
        ),
    ]
}

fn random_rationals(lo: &BinaryAngle, hi: &BinaryAngle, count: usize, seed: u64) -> Vec<BinaryAngle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let q: i64 = rng.gen_range(2..400);
        let p: i64 = rng.gen_range(1..q);
        let v = BigRational::new(BigInt::from(p), BigInt::from(q));
        if lo.value() < &v && &v < hi.value() {
            out.push(BinaryAngle::from_ratio(v).unwrap());
        }
    }
    out
}

fn c10_constancy() -> Outcome {
    let gap = random_rationals(&a("1/3"), &a("2/5"), 20, 10);
    let zero = gap.iter().all(|x| kneading::extended_entropy(x, &cfg()).unwrap().entropy_hi == 0.0);
    let h37 = kneading::entropy(&a("3/7"), &cfg()).unwrap().entropy_mid();
    let copy = random_rationals(&a("3/7"), &a("25/56"), 20, 11);
    let worst = copy
        .iter()
        .map(|x| (kneading::extended_entropy(x, &cfg()).unwrap().entropy_mid() - h37).abs())
        .fold(0f64, f64::max);
    outcome(zero && worst <= 1e-8, format!("gap (1/3, 2/5) all zero {zero}, copy (3/7, 25/56) max dev {worst:.1e}"))
}

fn c11_distance() -> Outcome {
    let pool: Vec<BinaryAngle> = corpus(12).into_iter().filter(|t| !t.value().is_zero()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pairs = 0;
    let mut failures = 0;
    while pairs < 1000 {
        let i = rng.gen_range(0..pool.len());
        let j = rng.gen_range(0..pool.len());
        if i == j {
            continue;
        }
        let (x, y) = if pool[i] > pool[j] { (&pool[i], &pool[j]) } else { (&pool[j], &pool[i]) };
        if !distance_bounds_check(x, y).unwrap().holds {
            failures += 1;
        }
        pairs += 1;
    }
    outcome(failures == 0, format!("{pairs} pairs, {failures} failures"))
}

fn main() {
    let mut results: Vec<(String, Outcome)> = vec![
        ("1".into(), c1_anchors()),
        ("2".into(), c2_golden()),
        ("3".into(), c3_period_doubling()),
        ("4".into(), c4_simplicity()),
        ("5".into(), c5_monotone_scan()),
        ("6".into(), c6_oracle()),
        ("7".into(), c7_holder()),
        ("8".into(), c8_lower_probe()),
    ];
    results.extend(c9_feigenbaum());
    results.push(("10".into(), c10_constancy()));
    results.push(("11".into(), c11_distance()));

    let mut failed = 0;
    for (id, o) in &results {
        let info = id.contains("info");
        println!("{} criterion {id}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && !info {
            failed += 1;
        }
    }
    println!("acceptance: {} checks, {failed} failed", results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

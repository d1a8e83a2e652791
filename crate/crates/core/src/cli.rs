//! The `knead` command line.
//!
//! Every subcommand prints a machine-readable record (JSON, or CSV for scans) built from
//! certified enclosures. Exit status: 0 success, 2 usage or parse error, 3 certification
//! failure, 4 cap exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Deserialize;

use crate::angles::BinaryAngle;
use crate::error::{Error, Result};
use crate::holder::{self, HolderConfig, Side};
use crate::kneading::{self, EntropyConfig};
use crate::numeric::pow2;
use crate::opendyn;
use crate::realset;

/// Environment variable holding the default fixed-point precision (bits).
pub const PRECISION_ENV: &str = "KNEAD_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(name = "knead", version, about = "Certified entropy of real unimodal maps from kneading angles")]
pub struct Cli {
    /// Fractional bits of the Newton fast path.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 128)]
    pub precision_bits: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certified entropy h(θ) = -log r.
    Entropy {
        angle: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Entropy (and dimension) over a grid of angles.
    Scan(ScanArgs),
    /// Local Hölder exponent by log-log regression.
    Holder {
        angle: String,
        #[arg(long, default_value_t = 8)]
        jmin: usize,
        #[arg(long, default_value_t = 48)]
        jmax: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
        /// Print the per-sample CSV instead of the summary.
        #[arg(long)]
        csv: bool,
    },
    /// Hausdorff dimension of the survivor set.
    Dimension {
        angle: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Print the transition structure instead of the summary.
        #[arg(long)]
        dump: bool,
    },
    /// Thue–Morse ladder towards the Feigenbaum angle.
    Feigenbaum {
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Membership in the set of real kneading angles.
    Member { angle: String },
    /// Period doubling.
    Pd { angle: String },
    /// Tip of the small copy.
    Tip { angle: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
    Both,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
            SideArg::Both => Side::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Entropy,
    Dimension,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
pub struct ScanArgs {
    /// TOML file with any of the keys below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    /// Grid k / 2^depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Explicit comma-separated angle list instead of a grid.
    #[arg(long, value_delimiter = ',')]
    pub angles: Option<Vec<String>>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ScanMode>,
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Scan settings after merging the config file and the flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub angles: Vec<BinaryAngle>,
    pub tol: f64,
    pub mode: ScanMode,
    pub output: OutputFormat,
    pub jobs: usize,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct ScanFile {
    from: Option<String>,
    to: Option<String>,
    depth: Option<usize>,
    angles: Option<Vec<String>>,
    tol: Option<f64>,
    mode: Option<ScanMode>,
    output: Option<OutputFormat>,
    jobs: Option<usize>,
}

/// Largest grid depth accepted by scans.
pub const MAX_SCAN_DEPTH: usize = 40;

impl ScanConfig {
    pub fn resolve(args: &ScanArgs) -> Result<Self> {
        let file: ScanFile = match &args.config {
            None => ScanFile::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| Error::Parse(format!("bad config {}: {e}", path.display())))?
            }
        };
        let tol = args.tol.or(file.tol).unwrap_or(1e-12);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Precondition("tol must be positive".into()));
        }
        let mode = args.mode.or(file.mode).unwrap_or(ScanMode::Entropy);
        let output = args.output.or(file.output).unwrap_or(OutputFormat::Csv);
        let jobs = args.jobs.or(file.jobs).unwrap_or(0);

        let angles = match args.angles.clone().or(file.angles) {
            Some(list) => {
                let mut v = list
                    .iter()
                    .map(|s| s.parse::<BinaryAngle>())
                    .collect::<Result<Vec<_>>>()?;
                v.sort();
                v.dedup();
                v
            }
            None => {
                let from: BinaryAngle = args.from.clone().or(file.from).unwrap_or_else(|| "0".into()).parse()?;
                let to: BinaryAngle = args.to.clone().or(file.to).unwrap_or_else(|| "1/2".into()).parse()?;
                let depth = args.depth.or(file.depth).unwrap_or(12);
                grid(&from, &to, depth)?
            }
        };
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if let Some(bad) = angles.iter().find(|a| a.value() > &half) {
            return Err(Error::out_of_range(bad.to_fraction_string(), "[0, 1/2]"));
        }
        Ok(ScanConfig { angles, tol, mode, output, jobs })
    }
}

/// Grid points `k / 2^depth` in `[from, to]`.
pub fn grid(from: &BinaryAngle, to: &BinaryAngle, depth: usize) -> Result<Vec<BinaryAngle>> {
    if from >= to {
        return Err(Error::Ordering("scan range needs from < to".into()));
    }
    if depth > MAX_SCAN_DEPTH {
        return Err(Error::CapExceeded { what: "scan grid depth", cap: MAX_SCAN_DEPTH });
    }
    let scale = BigRational::from_integer(pow2(depth));
    let lo = (from.value() * &scale).ceil().to_integer();
    let hi = (to.value() * &scale).floor().to_integer();
    let mut out = Vec::new();
    let mut k = lo;
    while k <= hi {
        out.push(BinaryAngle::from_ratio(BigRational::new(k.clone(), pow2(depth)))?);
        k += 1u32;
    }
    Ok(out)
}

/// One scan row; `None` fields mark a failed computation.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub theta: BinaryAngle,
    pub entropy: Option<(f64, f64)>,
    pub dimension: Option<(f64, f64)>,
    pub error: Option<Error>,
}

pub fn run_scan(cfg: &ScanConfig, precision_bits: usize) -> Result<Vec<ScanRow>> {
    let mut ecfg = EntropyConfig::with_tol(cfg.tol);
    ecfg.precision_bits = ecfg.precision_bits.max(precision_bits);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        cfg.angles
            .par_iter()
            .map(|theta| {
                let mut row = ScanRow { theta: theta.clone(), entropy: None, dimension: None, error: None };
                if cfg.mode != ScanMode::Dimension {
                    match kneading::extended_entropy(theta, &ecfg) {
                        Ok(r) => row.entropy = Some((r.entropy_lo, r.entropy_hi)),
                        Err(e) => row.error = Some(e),
                    }
                }
                if cfg.mode != ScanMode::Entropy {
                    match opendyn::dimension(theta, cfg.tol) {
                        Ok(d) => row.dimension = Some((d.dimension_lo, d.dimension_hi)),
                        Err(e) => row.error = row.error.take().or(Some(e)),
                    }
                }
                row
            })
            .collect()
    });
    Ok(rows)
}

fn fmt_pair(p: Option<(f64, f64)>) -> String {
    match p {
        Some((a, b)) => format!("{a:e},{b:e}"),
        None => ",".into(),
    }
}

pub fn scan_csv(rows: &[ScanRow], mode: ScanMode) -> String {
    let mut out = String::from(match mode {
        ScanMode::Entropy => "theta_num,theta_den,h_lo,h_hi\n",
        ScanMode::Dimension => "theta_num,theta_den,dim_lo,dim_hi\n",
        ScanMode::Both => "theta_num,theta_den,h_lo,h_hi,dim_lo,dim_hi\n",
    });
    for r in rows {
        let v = r.theta.value();
        out.push_str(&format!("{},{}", v.numer(), v.denom()));
        if mode != ScanMode::Dimension {
            out.push(',');
            out.push_str(&fmt_pair(r.entropy));
        }
        if mode != ScanMode::Entropy {
            out.push(',');
            out.push_str(&fmt_pair(r.dimension));
        }
        out.push('\n');
    }
    out
}

pub fn scan_json(rows: &[ScanRow]) -> serde_json::Value {
    serde_json::Value::Array(
        rows.iter()
            .map(|r| {
                let mut o = serde_json::json!({ "theta": r.theta.to_fraction_string() });
                if let Some((a, b)) = r.entropy {
                    o["h_lo"] = a.into();
                    o["h_hi"] = b.into();
                }
                if let Some((a, b)) = r.dimension {
                    o["dim_lo"] = a.into();
                    o["dim_hi"] = b.into();
                }
                if let Some(e) = &r.error {
                    o["error"] = e.to_string().into();
                }
                o
            })
            .collect(),
    )
}

fn angle_json(a: &BinaryAngle) -> serde_json::Value {
    serde_json::json!({ "fraction": a.to_fraction_string(), "binary": a.to_string() })
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Precondition(format!("write failed: {e}"));
    let entropy_cfg = |tol: f64| {
        let mut c = EntropyConfig::with_tol(tol);
        c.precision_bits = c.precision_bits.max(cli.precision_bits);
        c
    };
    match &cli.command {
        Command::Entropy { angle, tol, json } => {
            let theta: BinaryAngle = angle.parse()?;
            let r = kneading::entropy(&theta, &entropy_cfg(*tol))?;
            if *json {
                writeln!(out, "{}", r.to_json()).map_err(io)?;
            } else {
                writeln!(out, "theta = {} = {}", theta.to_fraction_string(), theta).map_err(io)?;
                writeln!(out, "h in [{:.15e}, {:.15e}]", r.entropy_lo, r.entropy_hi).map_err(io)?;
                writeln!(out, "certificate = {}", serde_json::to_value(r.certificate).expect("enum").as_str().unwrap_or("")).map_err(io)?;
                if let Some(d) = r.derivative_lb {
                    writeln!(out, "|P'(r)| >= {d:e}").map_err(io)?;
                }
            }
        }
        Command::Scan(args) => {
            let cfg = ScanConfig::resolve(args)?;
            let rows = run_scan(&cfg, cli.precision_bits)?;
            match cfg.output {
                OutputFormat::Csv => write!(out, "{}", scan_csv(&rows, cfg.mode)).map_err(io)?,
                OutputFormat::Json => writeln!(out, "{}", scan_json(&rows)).map_err(io)?,
            }
            let mut code = 0;
            for r in &rows {
                if let Some(e) = &r.error {
                    writeln!(err, "row {}: {e}", r.theta.to_fraction_string()).map_err(io)?;
                    code = code.max(e.exit_code());
                }
            }
            return Ok(code);
        }
        Command::Holder { angle, jmin, jmax, samples, side, csv } => {
            let theta: BinaryAngle = angle.parse()?;
            let cfg = HolderConfig {
                j_min: *jmin,
                j_max: *jmax,
                samples_per_scale: *samples,
                side: (*side).into(),
                entropy: entropy_cfg(1e-30),
            };
            let est = holder::local_exponent(&theta, &cfg)?;
            if *csv {
                write!(out, "{}", est.to_csv()).map_err(io)?;
            } else {
                writeln!(out, "{}", est.to_json()).map_err(io)?;
            }
        }
        Command::Dimension { angle, tol, dump } => {
            let theta: BinaryAngle = angle.parse()?;
            if *dump {
                write!(out, "{}", opendyn::build_automaton(&theta)?.dump()).map_err(io)?;
            } else {
                writeln!(out, "{}", opendyn::dimension(&theta, *tol)?.to_json()).map_err(io)?;
            }
        }
        Command::Feigenbaum { nmax, tol } => {
            let ladder = holder::feigenbaum_ladder(*nmax, *tol)?;
            let v: Vec<serde_json::Value> = ladder.iter().map(|r| r.to_json()).collect();
            writeln!(out, "{}", serde_json::Value::Array(v)).map_err(io)?;
        }
        Command::Member { angle } => {
            let theta: BinaryAngle = angle.parse()?;
            let class = realset::is_real_angle(&theta)?;
            writeln!(out, "{}", serde_json::to_value(class).expect("class serializes")).map_err(io)?;
        }
        Command::Pd { angle } => {
            let theta: BinaryAngle = angle.parse()?;
            let pd = realset::period_doubling(&theta)?;
            writeln!(out, "{}", serde_json::json!({ "theta": angle_json(&theta), "pd": angle_json(&pd) })).map_err(io)?;
        }
        Command::Tip { angle } => {
            let theta: BinaryAngle = angle.parse()?;
            let tip = realset::small_copy_tip(&theta)?;
            writeln!(out, "{}", serde_json::json!({ "theta": angle_json(&theta), "tip": angle_json(&tip) })).map_err(io)?;
        }
    }
    Ok(0)
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

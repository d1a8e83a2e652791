//! Topological entropy of real unimodal maps as a function of the kneading angle.
//!
//! The crate works with exact rational angles in `[0, 1]` whose binary expansions are
//! eventually periodic ([`angles::BinaryAngle`]). From such an angle it builds the
//! kneading series `P(t) = 1 + Σ ε_k t^k`, locates its smallest positive root `r` with a
//! certified enclosure and reports the entropy `h = -log r` ([`kneading`]).
//!
//! Around this core sit:
//!
//! - [`realset`]: membership in the set of real kneading angles, period doubling, small
//!   copies, gap components and the periodic approximants used by the lower-bound argument;
//! - [`holder`]: local Hölder exponent estimation by log-log regression, upper/lower bound
//!   probes and the Feigenbaum (Thue–Morse) ladder;
//! - [`opendyn`]: the survivor set of the doubling map with the hole `(θ, 1 - θ)`, encoded
//!   as a Markov subshift; its Perron root gives the Hausdorff dimension, which is an
//!   independent route to `h(θ) / log 2`;
//! - [`cli`]: the `knead` command-line surface.
//!
//! ```
//! use unimodal_entropy::{angles::BinaryAngle, kneading::{entropy, EntropyConfig}};
//!
//! let theta: BinaryAngle = "3/7".parse().unwrap();
//! let res = entropy(&theta, &EntropyConfig::default()).unwrap();
//! let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
//! assert!(res.entropy_lo <= golden && golden <= res.entropy_hi);
//! ```

#![forbid(unsafe_code)]

pub mod angles;
pub mod cli;
pub mod error;
pub mod holder;
pub mod kneading;
pub mod numeric;
pub mod opendyn;
pub mod poly;
pub mod realset;

pub use error::{Error, Result};

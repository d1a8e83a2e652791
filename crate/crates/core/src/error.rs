use thiserror::Error;

/// Errors raised by the angle, kneading, dimension and estimation pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("{value} is outside {expected}")]
    OutOfRange { value: String, expected: &'static str },

    #[error("cannot parse angle: {0}")]
    Parse(String),

    #[error("angles are equal")]
    EqualAngles,

    #[error("ordering violated: {0}")]
    Ordering(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search exhausted up to period cap {cap}")]
    SearchExhausted { cap: usize },

    #[error("membership re-check failed for {0}")]
    MembershipRecheck(String),

    #[error("tolerance {tol:e} not reached after {iterations} bisections")]
    ToleranceNotReached { tol: f64, iterations: usize },

    #[error("suspected multiple root near {near}: derivative not bounded away from zero")]
    SuspectedMultipleRoot { near: String },

    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("Markov property violated: {0}")]
    MarkovViolation(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("entropy is locally constant at all sampled scales (plateau)")]
    Plateau,
}

impl Error {
    pub(crate) fn out_of_range(value: impl ToString, expected: &'static str) -> Self {
        Error::OutOfRange {
            value: value.to_string(),
            expected,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ZeroDenominator
            | Error::OutOfRange { .. }
            | Error::Parse(_)
            | Error::EqualAngles
            | Error::Ordering(_)
            | Error::Precondition(_) => 2,
            Error::ToleranceNotReached { .. }
            | Error::SuspectedMultipleRoot { .. }
            | Error::MarkovViolation(_)
            | Error::NoConvergence(_)
            | Error::MembershipRecheck(_)
            | Error::Plateau => 3,
            Error::SearchExhausted { .. } | Error::CapExceeded { .. } => 4,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

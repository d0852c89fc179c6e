//! Crate-wide error type.

use crate::walk::PassageSample;

/// Errors raised by samplers, oracles and the experiment runner.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    Domain(String),
    /// A truncated series did not reach the requested tolerance; carries the
    /// partial sum so callers can judge how far off it is.
    Convergence { context: String, partial: f64 },
    /// Root bracketing failed while scanning for the `index`-th Bessel zero.
    NoBracket { index: usize },
    /// The rejection loop hit its iteration cap (degenerate time argument).
    RejectionCap { iterations: u64 },
    /// The walk hit its step cap; carries the partial sample reached so far.
    StepLimit { partial: Box<PassageSample> },
    /// A statistic was requested of an empty (or too small) sample.
    EmptySample,
    /// Invalid run configuration.
    Config(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Domain(msg) => write!(f, "domain error: {msg}"),
            Self::Convergence { context, partial } => {
                write!(f, "series for {context} did not converge (partial sum {partial:e})")
            }
            Self::NoBracket { index } => {
                write!(f, "failed to bracket Bessel zero #{index}")
            }
            Self::RejectionCap { iterations } => {
                write!(f, "rejection sampler exceeded {iterations} iterations")
            }
            Self::StepLimit { partial } => write!(
                f,
                "walk exceeded the step cap after {} steps (theta so far {:e})",
                partial.steps, partial.theta
            ),
            Self::EmptySample => write!(f, "empty sample"),
            Self::Config(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

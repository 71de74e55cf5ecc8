use std::fmt;

use thiserror::Error;

/// A single parameter that falls outside its family's admissible set.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub parameter: String,
    pub value: String,
    pub admissible: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} violates {} ∈ {}",
            self.parameter, self.value, self.parameter, self.admissible
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<Violation>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("singularity at t = {t}: {what}")]
    Singularity { t: f64, what: String },

    #[error("undefined value at t = {t}: {what}")]
    Undefined { t: f64, what: String },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("sampling failed at u1 = {u1}, w = {w}: {what}")]
    Sampling { u1: f64, w: f64, what: String },

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singularity { .. }
                | Error::Undefined { .. }
                | Error::Integration(_)
                | Error::Sampling { .. }
        )
    }

    /// The time point attached to a numerical failure, if any.
    pub fn time(&self) -> Option<f64> {
        match self {
            Error::Singularity { t, .. } | Error::Undefined { t, .. } => Some(*t),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

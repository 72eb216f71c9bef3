use thiserror::Error;

use crate::exprparse::{EvalError, ParseError};

/// Errors raised by the dynamics, transformation and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdmError {
    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("coordinate {coordinate} (x = {x}) lies outside the mass-profile domain")]
    DomainViolation { coordinate: usize, x: f64 },

    #[error("potential is singular at x_{coordinate} = 0")]
    SingularPoint { coordinate: usize },

    #[error("equation-of-motion coefficient diverges at x_{coordinate} = {x}")]
    SingularCoefficient { coordinate: usize, x: f64 },

    #[error("time-scale factor f_{coordinate} = {value} is not positive at t = {t}")]
    NonPositiveScale { coordinate: usize, t: f64, value: f64 },

    #[error("closed form for coordinate {coordinate} is not real at t = {t}")]
    NotReal { coordinate: usize, t: f64 },

    #[error("no period: {0}")]
    NoPeriod(String),

    #[error("invalid exact-solution spec: {0}")]
    InvalidSpec(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("wrong system kind: {0}")]
    WrongKind(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl PdmError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        PdmError::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Coordinate index attached to domain-type failures, if any.
    pub fn coordinate(&self) -> Option<usize> {
        match *self {
            PdmError::DomainViolation { coordinate, .. }
            | PdmError::SingularPoint { coordinate }
            | PdmError::SingularCoefficient { coordinate, .. }
            | PdmError::NonPositiveScale { coordinate, .. }
            | PdmError::NotReal { coordinate, .. } => Some(coordinate),
            _ => None,
        }
    }

    /// True for failures that mean "the state left the admissible region".
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            PdmError::DomainViolation { .. }
                | PdmError::SingularPoint { .. }
                | PdmError::SingularCoefficient { .. }
                | PdmError::Eval(_)
        )
    }
}

pub type Result<T, E = PdmError> = std::result::Result<T, E>;

use thiserror::Error;

use crate::state::StateViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a structural invariant (Hermiticity, trace, positivity, ordering).
    #[error("{invariant} violated: residual {residual:e}")]
    Invariant { invariant: &'static str, residual: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The operation is not defined for the requested arguments.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    Index { row: usize, col: usize, dim: usize },

    #[error("invalid density matrix: {}", join_violations(.0))]
    InvalidState(Vec<StateViolation>),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds tolerance {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// True for failures caused by the caller's input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invariant { .. }
                | Error::InvalidState(_)
                | Error::Parameter(_)
                | Error::Domain(_)
                | Error::Dimension { .. }
                | Error::Index { .. }
        )
    }
}

fn join_violations(v: &[StateViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

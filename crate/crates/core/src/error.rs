use thiserror::Error;

/// Errors raised by the calculus.
///
/// The variants are grouped by how a caller should react: bad input
/// (domain or parse problems), a violated mathematical precondition
/// (incomplete weight, non-elliptic operator, ...) or a numerical failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("point {0} is not interior to the domain")]
    NotInterior(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("weight is not complete: {0}")]
    IncompleteWeight(String),

    #[error("operation needs a ring unit (single-term function): {0}")]
    NotInvertible(String),

    #[error("elements are not composable in the {factor} factor (mismatch {distance:.3e})")]
    NotComposable { factor: &'static str, distance: f64 },

    #[error("chart domain violated: {0}")]
    ChartDomain(String),

    #[error("operator is not elliptic: {0}")]
    NotElliptic(String),

    #[error("symbol denominator vanishes: {0}")]
    SingularSymbol(String),

    #[error("property violated: {0}")]
    PropertyViolation(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { what: String, iterations: usize },

    #[error("singular solve at z = {0}")]
    SingularShift(String),

    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True when the error reflects a violated mathematical precondition
    /// rather than malformed input or a numerical failure.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::InvalidWeight(_)
                | Error::IncompleteWeight(_)
                | Error::NotInvertible(_)
                | Error::NotElliptic(_)
                | Error::SingularSymbol(_)
                | Error::NotComposable { .. }
                | Error::ChartDomain(_)
                | Error::SingularShift(_)
        )
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

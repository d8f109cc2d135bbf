use thiserror::Error;

use crate::dynamics::Trajectory;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point |z| = {modulus} lies on the pole of the chart (1 + eps z zbar = 0)")]
    PoleAtBoundary { modulus: f64 },

    #[error("point |z| = {modulus} is outside the operative domain ({reason})")]
    OutsideDomain { modulus: f64, reason: &'static str },

    #[error("ambient point violates the surface constraint by {violation:e}")]
    InvalidAmbientPoint { violation: f64 },

    #[error("singular point: {0}")]
    Singularity(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("level {level} lies beyond the bound-state cutoff {cutoff}")]
    NoBoundState { level: String, cutoff: String },

    #[error("no bound states: {0}")]
    NoBoundStates(String),

    #[error("symplectic form is singular (det = {det:e})")]
    SingularForm { det: f64 },

    #[error("trajectory left the operative domain at t = {time}")]
    DomainExit {
        time: f64,
        partial: Box<Trajectory>,
    },

    #[error("conserved-quantity drift {drift:e} exceeds budget {budget:e}")]
    DriftBudgetExceeded {
        drift: f64,
        budget: f64,
        trajectory: Box<Trajectory>,
    },

    #[error("unknown log `{0}`")]
    UnknownLog(String),

    #[error("requested {requested} eigenvalues from a matrix of dimension {dimension}")]
    TooManyEigenvalues { requested: usize, dimension: usize },

    #[error("radial grid is ill-conditioned: {0}")]
    GridCondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

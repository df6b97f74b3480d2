use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("subset is empty")]
    EmptySubset,
    #[error("edge {tail}->{head} has non-positive or non-finite weight {weight}")]
    NegativeWeight { tail: usize, head: usize, weight: f64 },
    #[error("point {0} lies outside the model domain")]
    OutOfDomain(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("exponent {0} out of range")]
    InvalidExponent(f64),
    #[error("gradient is negative at point {0}")]
    NegativeGradient(usize),
    #[error("curve family would exceed the cap of {0} paths")]
    BudgetExceeded(usize),
    #[error("neighbor graph has no path from {0} to {1}")]
    Disconnected(usize, usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("no coupling with finite cost exists")]
    InfiniteCost,
    #[error("measure along the trajectory does not have unit mass (step {step}, mass {mass})")]
    MassNotUnit { step: usize, mass: f64 },
    #[error("solver stalled after {iterations} iterations (residual {residual:e})")]
    SolverStall { iterations: usize, residual: f64 },
    #[error("simplex iteration cap reached after {0} pivots")]
    CycleGuardTripped(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

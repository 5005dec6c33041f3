use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("module dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("sampling budget must be nonzero")]
    ZeroBudget,
    #[error("expected a cochain of arity {expected}, got arity {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("module dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("radial trace did not converge (spread {spread:e})")]
    NonConvergent { spread: f64 },
    #[error("radial trace converges to a nonzero limit (magnitude {magnitude:e})")]
    NonzeroTrace { magnitude: f64 },
    #[error("t sequence must be strictly decreasing, positive and have at least 4 entries")]
    BadTSequence,
    #[error("grid mismatch: {0} vs {1} nodes")]
    GridMismatch(usize, usize),
    #[error("grid size must be a power of two and at least 8, got {0}")]
    BadGrid(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("estimated cost of {needed:.3e} base evaluations exceeds the limit {limit:.3e} ({what})")]
    CostExceeded { what: String, needed: f64, limit: f64 },
    #[error("numerical abort at t = {t}: {reason}")]
    NumericalAbort { t: f64, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

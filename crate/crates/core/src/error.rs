use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:e} below threshold relative to norm {scale:e}")]
    Singular { pivot: f64, scale: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not skew-symmetric (asymmetry {0:e})")]
    NotSkew(f64),

    #[error("argument norm {0} outside the principal branch (must be < 2π)")]
    Branch(f64),

    #[error("unsupported series order {0} (supported: 1..=8)")]
    UnsupportedOrder(usize),

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("invalid manifold point: {0}")]
    InvalidPoint(String),

    #[error("inconsistent tableau: {0}")]
    Tableau(String),

    #[error(
        "implicit solve did not converge after {iterations} iterations (last update {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("step size underflow at t = {t}: h = {h:e} is at the lower bound and still rejected")]
    StepUnderflow { t: f64, h: f64 },

    #[error("too many consecutive rejected steps ({rejects}) at t = {t}")]
    TooManyRejects { t: f64, rejects: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

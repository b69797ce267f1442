use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("non-finite sample at node {index:?}, component {component}")]
    NonFinite { index: Vec<usize>, component: usize },

    #[error("sample count mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("kernel is singular at the origin")]
    Singular,

    #[error("point {0:?} lies outside the grid")]
    OutOfDomain(Vec<f64>),

    #[error("kernel has sphere mean {mean:e}; principal value does not exist")]
    KernelNotMeanZero { mean: f64 },

    #[error("auxiliary solve did not reach tolerance {tol:e}; residual history {history:?}")]
    SolverDiverged { tol: f64, history: Vec<f64> },

    #[error("Newton inversion failed to converge at {0:?}")]
    InversionFailed(Vec<f64>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed field file at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("n = {0} is out of range (supported: 1..={max})", max = crate::boolfn::MAX_N)]
    SizeOutOfRange(usize),
    #[error("the RANDOM family requires a seed")]
    MissingSeed,
    #[error("CCF1 parse error at line {line}, offset {offset}: {message}")]
    Parse {
        line: usize,
        offset: usize,
        message: String,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("matrix is not symmetric: entries ({row}, {col}) differ by {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },
    #[error("eigenvalue {0:e} lies below the roundoff window")]
    NegativeEigenvalue(f64),
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("weight {value:e} at index {index} is on the simplex boundary")]
    BoundaryPoint { index: usize, value: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("simulation check failed: {0}")]
    Simulation(String),
}

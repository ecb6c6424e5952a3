use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("cannot normalize a zero (or non-finite) vector")]
    ZeroVector,

    #[error("vector has norm {0}, expected 1")]
    NotUnit(f64),

    #[error("lines are collinear (|det| = {0:e})")]
    Collinear(f64),

    #[error("angles are not realizable by three lines (cos alpha = {0:.6})")]
    Unrealizable(f64),

    #[error("angles describe a degenerate (coplanar) configuration (cos alpha = {0:.12})")]
    Degenerate(f64),

    #[error("angle {0} rad is outside (0, pi/2]")]
    AngleOutOfRange(f64),

    #[error("point coincides with a data line (|v.p| = {0})")]
    PoleSingularity(f64),

    #[error("operation is undefined for a big triangle")]
    BigTriangle,

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("constraint infeasible after {0} attempts")]
    Infeasible(usize),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

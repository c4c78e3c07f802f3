use thiserror::Error;

use crate::harmonic::Group;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("bandlimit {requested} exceeds available bandlimit {available}")]
    Bandlimit { requested: u32, available: u32 },

    #[error("fields live on different grids or groups")]
    GridMismatch,

    #[error("operation requires group {expected:?}, got {found:?}")]
    WrongGroup { expected: Group, found: Group },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix has eigenvalue {value:.3e} below the PSD tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("symbol depends on x; invariant application is not defined")]
    XDependent,

    #[error("malformed operator: {0}")]
    Malformed(String),

    #[error("unknown vector field `{0}`")]
    UnknownField(String),

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("linear solve did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("trajectory has {len} states, at least {min} required")]
    TrajectoryTooShort { len: usize, min: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid json field layout: {0}")]
    Layout(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors produced by the linear algebra kernel, the solvers and the
/// instance generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("row {row} has zero norm")]
    DegenerateRow { row: usize },

    #[error("matrix is rank deficient: sigma_min = {sigma_min:e} (sigma_max = {sigma_max:e})")]
    Singular { sigma_min: f64, sigma_max: f64 },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("problem too large: {0}")]
    Size(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced anywhere in the solver toolkit.
#[derive(Debug, Error)]
pub enum IlsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    /// `AᵀJb = 0`, so the relative residual is undefined.
    #[error("degenerate right-hand side: AᵀJb is zero")]
    DegenerateRhs,

    #[error("degenerate weights: all sampling weights are zero")]
    DegenerateWeights,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A₁ᵀA₁ (or the R factor of A) is singular.
    #[error("rank deficiency: nonpositive pivot {pivot} at index {index}")]
    RankDeficient { index: usize, pivot: f64 },

    #[error("column {0} of A1 is zero")]
    ZeroColumn(usize),

    /// A₁ᵀA₁ − A₂ᵀA₂ is not symmetric positive definite.
    #[error("problem is not well posed: A1ᵀA1 - A2ᵀA2 is not positive definite (pivot {pivot} at index {index})")]
    NotWellPosed { index: usize, pivot: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("problem generation failed: {0}")]
    Generation(String),

    #[error("measurement error: {0}")]
    Measurement(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, IlsError>;

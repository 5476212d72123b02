use thiserror::Error;

/// Errors raised by the spline, operator and verification routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: Cl({left}) vs Cl({right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported Clifford dimension {0}; expected 1 <= n <= 5")]
    UnsupportedDimension(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Gamma pole at nonpositive integer {0}")]
    Pole(f64),

    #[error("branch error: {0}")]
    Branch(String),

    #[error("invalid spline order: {0}")]
    Order(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("oscillatory integral did not converge: {0}")]
    Oscillatory(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

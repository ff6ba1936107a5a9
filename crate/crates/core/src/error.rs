//! Error types for every layer of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("non-finite argument")]
    NonFinite,
    #[error("exp(-z^2) overflows at z = {re} + {im}i; use the boundary kernel instead")]
    Overflow { re: f64, im: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be finite and non-negative, got {value}")]
    Domain { name: &'static str, value: f64 },
    #[error("detector separation must be positive, got {0}")]
    CoincidentDetectors(f64),
    #[error("energy gap of detector B ({omega_b}) is below that of detector A ({omega_a})")]
    GapOrdering { omega_a: f64, omega_b: f64 },
    #[error("positivity violated: p_a p_b - |c|^2 = {deficit:e}")]
    Positivity { deficit: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticError {
    #[error("parameters outside the regime: {0}")]
    RegimeMismatch(String),
    #[error("no closed form for this regime: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("epsilon extrapolation unstable: successive estimates differ by {0:e}")]
    ExtrapolationUnstable(f64),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("invalid quadrature settings: {0}")]
    InvalidSpec(&'static str),
    #[error("empty grid")]
    EmptyGrid,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("invalid bound {0}")]
    InvalidBound(f64),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("{0} cannot be optimized over the gap difference")]
    UnsupportedQuantity(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

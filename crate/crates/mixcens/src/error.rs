//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by estimation, sampling and quadrature routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its domain constraint (non-positive shape, etc.).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A function argument lies outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An order-statistic or scheme index is out of range.
    #[error("index error: {0}")]
    Index(String),

    /// Input data violate a structural requirement (length, sign, degeneracy).
    #[error("data error: {0}")]
    Data(String),

    /// An iterative routine failed to converge.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// Adaptive quadrature could not meet the requested tolerance. The best
    /// available value and its error estimate are carried along.
    #[error("quadrature did not converge: partial value {partial}, error estimate {error_estimate}")]
    Quadrature { partial: f64, error_estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

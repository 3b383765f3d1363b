//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::manifold::Model;

/// Errors raised by geometry primitives, solvers, Jacobians and the bench harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid curvature {value}: {reason}")]
    InvalidCurvature { value: f64, reason: &'static str },

    #[error("point is not on the {model:?} manifold: {reason}")]
    OffManifold { model: Model, reason: String },

    #[error("tangent vector is not tangent at its base point (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("model mismatch: {left:?} vs {right:?}")]
    ModelMismatch { left: Model, right: Model },

    #[error("curvature mismatch: {left} vs {right}")]
    CurvatureMismatch { left: f64, right: f64 },

    #[error("arccosh argument {0} is below 1")]
    ArccoshDomain(f64),

    #[error("degenerate Möbius denominator {0:e}")]
    DegenerateDenominator(f64),

    #[error("numerical blow-up near the boundary: {0}")]
    Boundary(String),

    #[error("{op} is not supported on the {model:?} model")]
    Unsupported { model: Model, op: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("stationarity residual {residual:e} exceeds {limit:e}; the point is not a converged mean")]
    NotStationary { residual: f64, limit: f64 },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

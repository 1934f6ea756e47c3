//! Error type shared by all solver and analysis routines.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VlabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at grid index ({ix}, {iy})")]
    NonFinite { ix: usize, iy: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("CFL violation at t = {t}: max |u| = {max_u}, dt = {dt}, limit = {limit}")]
    CflViolation { t: f64, max_u: f64, dt: f64, limit: f64 },

    #[error("vortex collision at t = {t}: min pairwise distance {dist} below threshold {threshold}")]
    Collision { t: f64, dist: f64, threshold: f64 },

    #[error("nonpositive value at grid index ({ix}, {iy}) where the entropy weight matters")]
    NonPositive { ix: usize, iy: usize },

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("residual {residual:.3e} above tolerance {tol:.3e} (condition estimate {cond:.3e})")]
    ResidualTooLarge { residual: f64, tol: f64, cond: f64 },

    #[error("timestamp mismatch between snapshots and trajectory at index {0}")]
    TimestampMismatch(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, VlabError>;

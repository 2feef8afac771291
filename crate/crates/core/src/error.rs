use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("algebra mismatch: operands live over different site algebras")]
    AlgebraMismatch,

    #[error("invalid site algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("contour pierced: resolvent norm {norm:.3e} exceeds {limit:.3e}")]
    ContourPierced { norm: f64, limit: f64 },

    #[error("not an idempotent: |e^2 - e| = {residual:.3e}")]
    NotIdempotent { residual: f64 },

    #[error("not a projection: {0}")]
    NotProjection(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("invalid partition of unity: {0}")]
    InvalidPartition(String),

    #[error("oscillation {oscillation:.4} exceeds bound {bound:.4} on tuple {tuple:?}")]
    OscillationViolated { tuple: Vec<usize>, oscillation: f64, bound: f64 },

    #[error("cochain has no value on face {0:?}")]
    MissingFace(Vec<usize>),

    #[error("degree {0} Chern characters are not supported (n <= 2)")]
    UnsupportedDegree(usize),

    #[error("chain tuple {0:?} is not contained in any cover set")]
    ChainEscapesCover(Vec<usize>),

    #[error("transition g_{i}{j} is undefined at point {point} where chi_{i} chi_{j} > 0")]
    MissingTransition { i: usize, j: usize, point: usize },

    #[error("cocycle invalid: {0}")]
    InvalidCocycle(String),

    #[error("cover precondition unmet: {0}")]
    CoverPrecondition(String),

    #[error("invalid principal bundle: {0}")]
    InvalidBundle(String),

    #[error("expected a vector of {expected}, got {found}")]
    ModuleMismatch { expected: &'static str, found: &'static str },

    #[error("rank jump: rank {first} at point 0 but {other} at point {point}")]
    RankJump { first: usize, other: usize, point: usize },

    #[error("flatness certificate failed: {0}")]
    CertificateFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

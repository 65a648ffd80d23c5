use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("measures live on different grids")]
    GridMismatch,

    #[error("singular density: reference vanishes at cell {index} where mass is required")]
    SingularDensity { index: usize },

    #[error("input is not convex near index {index} (second difference {second_difference:e})")]
    NotConvex { index: usize, second_difference: f64 },

    #[error("exact transport budget exceeded: {points} points > {budget}")]
    TooLarge { points: usize, budget: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected a positive value, got {0}")]
    NotPositive(f64),

    #[error("time step {dt:e} violates the stability bound; use dt <= {suggested:e}")]
    UnstableStep { dt: f64, suggested: f64 },

    #[error("particle {index} diverged at t = {time}")]
    DivergedParticle { index: usize, time: f64 },

    #[error("particle clouds differ in size or dimension ({left} vs {right})")]
    CloudMismatch { left: usize, right: usize },

    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("boundary flux {flux:e} exceeds the allowed leak rate at t = {time}")]
    BoundaryLeak { flux: f64, time: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl Error {
    /// Stable machine-readable identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDensity(_) => "InvalidDensity",
            Error::UnknownCatalogEntry(_) => "UnknownCatalogEntry",
            Error::GridMismatch => "GridMismatch",
            Error::SingularDensity { .. } => "SingularDensity",
            Error::NotConvex { .. } => "NotConvex",
            Error::TooLarge { .. } => "TooLarge",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NotPositive(_) => "NotPositive",
            Error::UnstableStep { .. } => "UnstableStep",
            Error::DivergedParticle { .. } => "DivergedParticle",
            Error::CloudMismatch { .. } => "CloudMismatch",
            Error::NotAntisymmetric => "NotAntisymmetric",
            Error::InvalidSeries(_) => "InvalidSeries",
            Error::BoundaryLeak { .. } => "BoundaryLeak",
            Error::NumericalFailure(_) => "NumericalFailure",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

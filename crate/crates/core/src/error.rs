use thiserror::Error;

/// Errors produced by the simulation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site-count mismatch: {left} vs {right}")]
    SiteMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{n_sites} sites exceeds the dense limit of {limit}")]
    DenseLimit { n_sites: usize, limit: usize },

    #[error("invalid Pauli axes string {0:?}")]
    InvalidAxes(String),

    #[error("site index {site} out of range for {n_sites} sites (sites are 1-based)")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("coefficient must be finite, got {0}")]
    NonFiniteCoefficient(f64),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("trial set is empty")]
    EmptyTrialSet,

    #[error("fidelity {0} outside [0, 1]")]
    FidelityOutOfRange(f64),

    #[error("no candidates")]
    NoCandidates,

    #[error("no marked candidates (M = 0)")]
    NoMarked,

    #[error("parameter count mismatch: ansatz has {expected}, got {actual}")]
    ParameterCount { expected: usize, actual: usize },

    #[error("parameter index {index} out of range ({n_params} parameters)")]
    ParameterIndex { index: usize, n_params: usize },

    #[error("singular linear system (condition number {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("singular linear system at step {step}: condition number {condition:.3e}")]
    SingularAtStep { step: usize, condition: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

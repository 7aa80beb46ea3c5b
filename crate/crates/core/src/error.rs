use thiserror::Error;

/// Errors raised across the analytic and simulation pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("need at least two atoms, got {0}")]
    InsufficientAtoms(usize),

    #[error("invalid atom pair: the two atoms coincide")]
    InvalidPair,

    #[error("invalid geometry: r1 = {r1} exceeds r2 = {r2}")]
    InvalidGeometry { r1: f64, r2: f64 },

    #[error("gain ratio {0} outside [0, 1]")]
    InvalidRatio(f64),

    #[error("rejection sampling of a cell exhausted after {0} attempts")]
    CellSamplingExhausted(usize),

    #[error("Laplace transform evaluated at a pole (s = {0})")]
    PoleError(String),

    #[error("branch point of the square root reached (s = {0})")]
    BranchPointError(String),

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("integration did not converge: {0}")]
    IntegrationError(String),

    #[error("closed form requires path-loss exponent 4, got {0}")]
    WrongExponent(f64),

    #[error("mean interference diverges for path-loss exponent {0} <= 2")]
    DivergentMean(f64),

    #[error("mean interference overflows near r2 = {0}")]
    DivergentNearField(f64),

    #[error("fewer than two atoms in {0} consecutive draws")]
    RedrawLimit(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

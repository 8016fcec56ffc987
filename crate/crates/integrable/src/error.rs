//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("state space of size {0} exceeds the dense cap of 2^20")]
    StateSpaceTooLarge(usize),
    #[error("matrix is not a generator: {0}")]
    NotAGenerator(String),
    #[error("chain is reducible: null space has dimension {0}; specify a communicating class")]
    ReducibleChain(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid deformation parameter q = {0}")]
    InvalidDeformation(f64),
    #[error("representations use different deformation parameters ({0} vs {1})")]
    DeformationMismatch(f64, f64),
    #[error("rate out of range: {0}")]
    RateOutOfRange(String),
    #[error("series did not terminate or converge within {0} terms")]
    NonTerminatingDivergent(usize),
    #[error("lower parameter of the series vanishes at term {0}")]
    PoleInLowerParameters(usize),
    #[error("operator side {0} is not the square of a site dimension")]
    DimensionNotASquare(usize),
    #[error("pole at q z = 1")]
    PoleAtQZEqualsOne,
    #[error("family evaluation hit a pole at {0}")]
    EvaluationPole(String),
    #[error("denominator vanishes: {0}")]
    PoleInDenominator(String),
    #[error("family is not regular at z = 1 (residual {0:e})")]
    NotRegular(f64),
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("ground state has a zero entry at index {0}")]
    ZeroEntryInGroundState(usize),
    #[error("vector is not an eigenvector (residual {0:e})")]
    NotAnEigenvector(f64),
    #[error("transformed matrix has a negative off-diagonal entry {value:e} at ({row}, {col})")]
    NegativeOffDiagonal { row: usize, col: usize, value: f64 },
    #[error("contour hits a pole: {0}")]
    ContourHitsPole(String),
    #[error("quadrature did not converge (last change {0:e})")]
    NonConvergedQuadrature(f64),
    #[error("lattice window failed to stabilise (last change {0:e})")]
    WindowTooSmall(f64),
    #[error("inconsistent boundary: {0}")]
    InconsistentBoundary(String),
    #[error("spectral parameter sits on a pole: {0}")]
    PoleAtZEqualsQPower(String),
    #[error("spectral ladder hits a pole: {0}")]
    PoleInSpectralLadder(String),
    #[error("q-Pochhammer denominator vanishes: {0}")]
    PoleInPochhammer(String),
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error("leading rate of the boundary recurrence is zero")]
    ZeroLeadingRate,
    #[error("truncation did not converge up to M = {m} (last TV change {delta:e})")]
    TruncationNotConverged { m: usize, delta: f64 },
    #[error("matrix product weight is negative ({0:e})")]
    NegativeWeight(f64),
}

use thiserror::Error;

/// Errors produced by the numerical machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("adaptive integrator failed: {0}")]
    IntegratorFailure(String),

    #[error("generating function too close to zero: |f({x})| = {value:e} below floor {floor:e}")]
    SingularGenerator { x: f64, value: f64, floor: f64 },

    #[error("solution pair is degenerate: |Lambda| = {0:e}")]
    DegeneratePair(f64),

    #[error("energy {0:e} is at or below the zero-mode threshold; 1/sqrt(E) map undefined")]
    ZeroModeEnergy(f64),

    #[error("E^2 + d = {0:e} <= 0; second-order normalization undefined")]
    NormalizationFailure(f64),

    #[error("coefficient constraint violated: AB - C^2 = {found:e}, expected {expected:e}")]
    ConstraintViolation { found: f64, expected: f64 },

    #[error("rho^2 non-positive at x = {x}: {value:e}")]
    NonPositiveRho { x: f64, value: f64 },

    #[error("EMP integration blew up near x = {x}: rho = {rho:e}")]
    BlowUp { x: f64, rho: f64 },

    #[error("input rho is not an EMP solution: residual {residual:e} exceeds guard {guard:e}")]
    InputNotSolution { residual: f64, guard: f64 },

    #[error("mismatched inputs: {0}")]
    MismatchedInputs(String),

    #[error("quantum-number shift {0} is not close to an integer")]
    NonIntegerShift(f64),

    #[error("no sign change brackets N(E) = {target} on the scanned range")]
    RootNotBracketed { target: f64 },

    #[error("N(E) scan is not monotone; refusing to bisect")]
    NonMonotoneScan,

    #[error("invalid square-well index k = {0}")]
    InvalidK(i64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

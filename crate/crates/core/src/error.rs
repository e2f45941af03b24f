//! Error type shared by every evaluator in the crate.

use thiserror::Error;

/// Everything that can go wrong while loading geometry or evaluating a sum.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("row {row} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("operation not supported in dimension {0}")]
    UnsupportedDimension(usize),

    #[error("vertex index {index} out of range for {len} vertices")]
    BadIndex { index: usize, len: usize },

    #[error("cone is not pointed: its generators span a line through the apex")]
    NotPointed,

    #[error("degenerate cone: {0}")]
    DegenerateCone(String),

    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),

    #[error("epsilon schedule needs at least 2 values, got {0}")]
    ScheduleTooShort(usize),

    #[error("quadrature window too small: estimated tail mass {0:e}")]
    QuadratureUnderResolved(f64),

    #[error("pole hit: |<w_{generator}, z>| = {distance:e} at lattice point {lattice_point:?}")]
    PoleHit {
        generator: usize,
        distance: f64,
        lattice_point: Vec<i64>,
    },

    #[error("s lies outside the convergence domain of the cone sum: {0}")]
    ConvergenceDomain(String),

    #[error("extrapolation did not converge: {0}")]
    NonConvergent(String),

    #[error("imaginary residue {imag:e} at the sigma = 0 intercept (real part {real})")]
    ImaginaryResidue { real: f64, imag: f64 },

    #[error("polynomial fit residual {residual:e} exceeds {limit:e}")]
    PoorFit { residual: f64, limit: f64 },

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

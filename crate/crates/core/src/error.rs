use thiserror::Error;

/// Errors raised by the numerical engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is not one (got {trace})")]
    TraceNotOne { trace: f64 },

    #[error("tangent is not traceless (trace {trace:e})")]
    TraceNotZero { trace: f64 },

    #[error("negative eigenvalue {eigenvalue:e}")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("generator is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    GeneratorNotHermitian { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("normalization underflow: <phi'|phi'> = {norm_sq:e}")]
    NormalizationUnderflow { norm_sq: f64 },

    #[error("invalid finite-difference step {0}")]
    InvalidStep(f64),

    #[error("beta = {0} outside [0, pi]")]
    InvalidBeta(f64),

    #[error("weight derivative {max_weight_derivative:e} makes the classical term diverge at beta = pi")]
    FcDivergence { max_weight_derivative: f64 },

    #[error("degenerate support weights at beta = pi need eigen-curve gauge data")]
    GaugeDataRequired,

    #[error("observable carries no signal (|d<A>/dtheta| = {derivative:e})")]
    ZeroSignalDerivative { derivative: f64 },

    #[error("analytic and finite-difference signal derivatives disagree ({analytic:e} vs {finite_difference:e})")]
    DerivativeMismatch { analytic: f64, finite_difference: f64 },

    #[error("invalid weight p = {0}")]
    InvalidWeight(f64),

    #[error("closed form is singular at p = {0}")]
    DegenerateWeight(f64),

    #[error("Fock cutoff {n_max} leaves tail mass {tail:e}")]
    TruncationTooSmall { n_max: usize, tail: f64 },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("intensity grid must contain chi = 0, pi/2 and pi ({0})")]
    InsufficientGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

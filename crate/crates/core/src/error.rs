use thiserror::Error;

/// Errors raised by the simulator, the gate builders and the pulse compiler.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("spin index {index} out of range for a {n_spins}-spin register")]
    SpinIndex { index: usize, n_spins: usize },

    #[error("exchange needs two distinct spins, got {0} twice")]
    SameSpin(usize),

    #[error("no DFS sector with c = {c} and m = {m}")]
    InvalidSector { c: usize, m: f64 },

    #[error("basis vectors are not orthonormal (max deviation {deviation:e})")]
    NonOrthonormal { deviation: f64 },

    #[error("invalid basis label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },

    #[error("operator leaks out of the logical subspace (off-block norm {leakage:e})")]
    Leaks { leakage: f64 },

    #[error("restricted operator is not a single-axis logical operator")]
    NotSingleAxis,

    #[error("zero Zeeman splitting: logical Z rotations are unreachable when Δg·B = 0")]
    DegenerateZeeman,

    #[error("invalid device: {0}")]
    InvalidDevice(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("integration did not converge after {steps} steps (last step-halving change {estimate:e})")]
    NonConvergence { steps: usize, estimate: f64 },

    #[error("drive amplitude is {ratio:.3} of the qubit frequency; rotating-wave control needs <= 0.1")]
    RwaViolation { ratio: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("lowering failed: {0}")]
    Lowering(String),

    #[error("invalid timing model: {0}")]
    InvalidTiming(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The Hamiltonian evaluator returned a non-Hermitian matrix.
    #[error("non-Hermitian Hamiltonian at t = {time:.6e} s (max |H - H^dag| = {deviation:.3e})")]
    NonHermitian { time: f64, deviation: f64 },

    /// The integrator lost trace beyond tolerance; the step is too large.
    #[error("trace drift {drift:.3e} exceeds tolerance; reduce the time step (dt = {dt:.3e} s)")]
    StepTooLarge { drift: f64, dt: f64 },

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("mode {mode} out of range for {count} modes")]
    InvalidMode { mode: usize, count: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cutoff {cutoff} leaves tail weight {tail:.3e} above tolerance")]
    InsufficientCutoff { cutoff: usize, tail: f64 },

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("degenerate unperturbed levels: {0}")]
    Degeneracy(String),

    #[error("steady state is not unique: {0}")]
    DegenerateSteadyState(String),

    #[error("integration unstable: {0}")]
    Unstable(String),

    #[error("grid inadequate: {0}")]
    GridTail(String),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid phase-space index: {0}")]
    InvalidIndex(String),

    #[error("phase-space indices belong to different systems")]
    SystemMismatch,

    #[error("state is not normalized: |psi| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("matrix is not unitary: |U^dag U - I|_F = {defect:.3e} exceeds tolerance {tol:.1e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("unsupported alpha {0}: require alpha > 0 and alpha != 1")]
    InvalidAlpha(f64),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("Haar-average variant {variant} does not apply to d = {d}")]
    InvalidVariant { variant: &'static str, d: usize },

    #[error("{0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Format(String),
}

use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is singular (det = 0)")]
    SingularMatrix,
    #[error("matrix has an eigenvalue that is a root of unity")]
    NonErgodicMatrix,
    #[error("|det A| = 1; use orbit representatives instead of lattice shells")]
    UnimodularMatrix,
    #[error("operation not applicable: {0}")]
    CaseNotApplicable(String),
    #[error("eigenvalue is rational")]
    RationalEigenvalue,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("frequency exceeds the big-integer budget ({bits} bits)")]
    FrequencyOverflow { bits: u64 },
    #[error("point lies on the dyadic null set")]
    NullSetPoint,
    #[error("dyadic window exhausted")]
    WindowExhausted,
    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpinError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} out of range (supported 1..={max})", max = crate::MAX_DIM)]
    DimensionOutOfRange(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("multivector is not even-graded (odd part norm {0:.3e})")]
    NotEven(f64),

    #[error("multivector is not a unit: x * reverse(x) deviates from +-1 by {0:.3e}")]
    NotUnit(f64),

    #[error("matrix is not antisymmetric (residual {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("matrix is not special orthogonal: {0}")]
    NotSpecialOrthogonal(String),

    #[error("subalgebra basis is not closed under the bracket (residual {0:.3e})")]
    NotBracketClosed(f64),

    #[error("unstable numerical rank: {0}")]
    UnstableRank(String),

    #[error("invalid holonomy spec: {0}")]
    InvalidSpec(String),

    #[error("unsupported group: {0}")]
    Unsupported(String),

    #[error("indeterminate rank decision (singular value gap {gap:.3e})")]
    IndeterminateRank { gap: f64 },

    #[error("fixed spinor residual {0:.3e} exceeds the tolerance")]
    ResidualTooLarge(f64),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

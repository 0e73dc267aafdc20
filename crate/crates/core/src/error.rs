use thiserror::Error;

/// Errors raised by tensor construction and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("entry {index} is not finite")]
    NonFinite { index: usize },

    #[error("tensor is not Hermitian: defect {defect:e} at flat position ({row}, {col})")]
    NotHermitian { defect: f64, row: usize, col: usize },

    #[error("matrix trace has imaginary part {imag:e}")]
    NonRealTrace { imag: f64 },

    #[error("matrix for mode {mode} is not unitary (defect {defect:e})")]
    NotUnitary { mode: usize, defect: f64 },

    #[error("mode index {index} out of range for an order-{order} tensor")]
    BadModeIndex { index: usize, order: usize },

    #[error("partial trace needs at least one kept mode")]
    EmptyKeepSet,

    #[error("expected a tensor of order {expected}, got order {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("factor vectors of mode {mode} are not orthonormal (defect {defect:e})")]
    NotOrthogonal { mode: usize, defect: f64 },

    #[error("tensor is numerically zero")]
    ZeroTensor,

    #[error("contraction vanished for mode {mode}; restart from another point")]
    ZeroContraction { mode: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("flattened dimension {dim} exceeds the solve budget {budget}")]
    BudgetExceeded { dim: usize, budget: usize },

    #[error("singular basis system for mode {mode} (pivot {pivot:e})")]
    SingularBasisSystem { mode: usize, pivot: f64 },

    #[error("singular linear system (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("eigen-factor matrix is rank deficient")]
    RankDeficientU,

    #[error("factor lists do not represent the same tensor (Gram defect {defect:e})")]
    NotSameTensor { defect: f64 },

    #[error("weights must be positive: {0}")]
    NonPositiveWeights(String),

    #[error("inconsistent shapes in ensemble: {0}")]
    InconsistentShapes(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("outside the supported enumeration scope: {0}")]
    OutOfScope(String),

    #[error("every element of the span has rank at most one")]
    DegenerateSpan,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

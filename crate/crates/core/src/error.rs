use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("operator is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.6e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("scalar fields differ between operands")]
    FieldMismatch,

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("invalid interval [{lo}, {hi}]: lower end must be below upper end")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("partition cell {index} has non-positive mass {mass}")]
    NonpositiveMass { index: usize, mass: f64 },

    #[error("quadrature needs at least one node")]
    EmptyQuadrature,

    #[error("malformed bounds: need 0 < A <= B, got A = {lower}, B = {upper}")]
    MalformedBounds { lower: f64, upper: f64 },

    #[error("system is not a biframe (identity target with a positive lower bound)")]
    NotABiframe,

    #[error("system is not a K-biframe for the requested target{}", term.map(|j| format!(" (term {j})")).unwrap_or_default())]
    NotAKBiframe { term: Option<usize> },

    #[error("operator is zero")]
    ZeroOperator,

    #[error("operator is singular")]
    SingularOperator,

    #[error("frame operator is singular")]
    SingularFrameOperator,

    #[error("system is not tight for its target (relative residual {residual:.3e})")]
    NotTight { residual: f64 },

    #[error("operators do not commute (relative residual {residual:.3e})")]
    DoesNotCommute { residual: f64 },

    #[error("range of U is not contained in range of K (relative residual {residual:.3e})")]
    RangeNotContained { residual: f64 },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

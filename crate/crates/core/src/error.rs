use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coordinate vector of length {0} is not 2n+1 with n >= 1")]
    InvalidLength(usize),

    #[error("non-finite coordinate in point")]
    NonFiniteCoordinate,

    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension parameter n must be at least 1")]
    InvalidDimension,

    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),

    #[error("singular matrix (|det B| = {det_b:e}, a = {a:e})")]
    SingularMatrix { det_b: f64, a: f64 },

    #[error("matrix mixes horizontal and center directions; only graded matrices have a finite Heisenberg norm")]
    NotGraded,

    #[error("integrand returned a non-finite value ({value}) at a quadrature node")]
    NonFiniteIntegrand { value: f64 },

    #[error("quadrature budget {budget} is below the minimum {needed} for this region")]
    BudgetTooSmall { budget: u64, needed: u64 },

    #[error("whole-space integration requires tail_k to be set")]
    MissingTail,

    #[error("integral did not converge: {0}")]
    Divergent(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("theorem hypotheses violated: {}", .0.join("; "))]
    Hypotheses(Vec<String>),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

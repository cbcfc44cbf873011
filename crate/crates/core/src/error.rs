use thiserror::Error;

/// Errors reported by constructors and operations on malformed input.
///
/// Numerical tolerances for what counts as malformed are defined in
/// [`crate::qstate`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("state is not normalized: squared norm is {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("outcome states {i} and {j} are not orthogonal: overlap {overlap:e}")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },

    #[error("measurement has {got} outcome states for dimension {d}")]
    IncompleteBasis { d: usize, got: usize },

    #[error("outcome index {k} out of range for dimension {d}")]
    OutcomeOutOfRange { k: usize, d: usize },

    #[error("basis index {j} out of range for dimension {d}")]
    BasisIndexOutOfRange { j: usize, d: usize },

    #[error("fidelity {0} outside [0, 1]")]
    InvalidFidelity(f64),

    #[error("polar angle {0} outside [0, pi]")]
    InvalidPolarAngle(f64),

    #[error("invalid support interval [{a}, {b}]; need 0 <= a < b <= 1")]
    InvalidInterval { a: f64, b: f64 },

    #[error("ontic coordinate x = {0} outside [0, 1]")]
    XOutOfRange(f64),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("epistemic state has no support components")]
    EmptySupport,

    #[error("support components {i} and {j} coincide")]
    DuplicateComponent { i: usize, j: usize },

    #[error("unknown model \"{0}\"")]
    UnknownModel(String),

    #[error("model {model} requires dimension {required}, got {got}")]
    UnsupportedDimension {
        model: &'static str,
        required: usize,
        got: usize,
    },

    #[error("measurement is ordered for a different anchor than required here")]
    AnchorMismatch,

    #[error("need at least {min} states, got {got}")]
    NotEnoughStates { min: usize, got: usize },

    #[error("sample count {got} below minimum {min}")]
    NotEnoughSamples { min: u64, got: u64 },

    #[error("search budget {got} below minimum {min}")]
    BudgetTooSmall { min: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

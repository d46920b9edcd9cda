use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("vector with tail {tail} is not representable in {space}")]
    NotRepresentable { space: String, tail: String },

    #[error("invalid space descriptor: {0}")]
    InvalidSpace(String),

    #[error("undefined pairing: {0}")]
    UndefinedPairing(String),

    #[error("index map is not strictly increasing: {0}")]
    NonMonotoneIndexMap(String),

    #[error("horizon {horizon} is too small (need at least {min})")]
    HorizonTooSmall { horizon: u64, min: u64 },

    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),

    #[error("cap exceeded: {what} is {actual}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        actual: usize,
        cap: usize,
    },

    #[error("norm of {0} is not polyhedral")]
    NonPolyhedral(String),

    #[error("unregistered functional family `{0}`")]
    UnregisteredFamily(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unstable estimate: {0}")]
    EstimateUnstable(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized: norm² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |H - H†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("duplicate basis label index {0}")]
    DuplicateLabel(usize),

    #[error("detector needs at least {required} pointer states, got {given}")]
    DetectorTooSmall { required: usize, given: usize },

    #[error("joint state already carries an observer register")]
    ObserverPresent,

    #[error("joint state has no {0} register")]
    MissingRegister(&'static str),

    #[error("register {index} out of range ({count} registers)")]
    InvalidRegister { index: usize, count: usize },

    #[error("{what} exceeds the size guard of {bound}")]
    SizeGuard { what: &'static str, bound: u64 },

    #[error("degenerate presence {rho_u}: variance vanishes, use the exact count distribution")]
    Degenerate { rho_u: f64 },

    #[error("evidence vanished: likelihood·prior is zero on the whole grid")]
    ZeroEvidence,

    #[error("cannot condition on an event of zero weight")]
    NullCondition,

    #[error("outcome labels do not match")]
    LabelMismatch,

    #[error("no bets to choose from")]
    EmptyBets,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

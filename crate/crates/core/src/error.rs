use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the pool engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-positive input: {0}")]
    NonPositiveInput(String),

    #[error("curve parameter k={0} outside [0, 1]")]
    KOutOfRange(f64),

    #[error("weight policy violation: {0}")]
    PolicyViolation(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("sign violation: {0}")]
    SignViolation(String),

    #[error("growth factor {0} is not positive (floor 1e-12)")]
    NonPositiveGrowth(f64),

    #[error("growth vector has more than one unknown slot")]
    MultipleUnknowns,

    #[error("growth vector has no unknown slot")]
    NoUnknown,

    #[error("no positive root: {0}")]
    NoPositiveRoot(String),

    /// The k=1 curve admits no settlement removing half or more of an
    /// asset's balance in one trade; such requests are rejected outright.
    #[error("half-pool restriction at k=1: {0}")]
    KRestriction(String),

    #[error("no sign change of the residual over [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("bisection did not converge within {0} iterations")]
    MaxIterations(u32),

    #[error("unknown token: {0}")]
    UnknownToken(String),

    #[error("insufficient balance: {0}")]
    InsufficientBalance(String),

    #[error("infeasible trade: {0}")]
    InfeasibleTrade(String),

    #[error("invalid trade: {0}")]
    InvalidTrade(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Stable machine-readable tag for this error, used in CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveInput(_) => "NonPositiveInput",
            Error::KOutOfRange(_) => "KOutOfRange",
            Error::PolicyViolation(_) => "PolicyViolation",
            Error::LengthMismatch(_) => "LengthMismatch",
            Error::SignViolation(_) => "SignViolation",
            Error::NonPositiveGrowth(_) => "NonPositiveGrowth",
            Error::MultipleUnknowns => "MultipleUnknowns",
            Error::NoUnknown => "NoUnknown",
            Error::NoPositiveRoot(_) => "NoPositiveRoot",
            Error::KRestriction(_) => "KRestriction",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::MaxIterations(_) => "MaxIterations",
            Error::UnknownToken(_) => "UnknownToken",
            Error::InsufficientBalance(_) => "InsufficientBalance",
            Error::InfeasibleTrade(_) => "InfeasibleTrade",
            Error::InvalidTrade(_) => "InvalidTrade",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::MalformedDocument(_) => "MalformedDocument",
            Error::InvariantViolation(_) => "InvariantViolation",
        }
    }

    /// True for errors meaning "this trade cannot settle on the curve",
    /// as opposed to malformed input or an internal consistency failure.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::NoPositiveRoot(_)
                | Error::KRestriction(_)
                | Error::InfeasibleTrade(_)
                | Error::InsufficientBalance(_)
                | Error::NoSignChange { .. }
        )
    }
}

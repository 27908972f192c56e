use thiserror::Error;

/// Errors raised by the search engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Parameters outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two points that do not live in the same ambient frame.
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: String, right: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An enumeration would exceed the configured size cap.
    #[error("class has {count} elements, above the enumeration cap {cap}")]
    SizeCap { count: u128, cap: u128 },

    /// An exact integer computation left the representable range.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// No certified method is available for this instance.
    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// An exact verification found a forbidden distance.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the combinatorial kernel and the audits built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sets have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("element {element} lies outside the ground set [1, {n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("ground set size {n} exceeds the configured cap of {cap} bits")]
    GroundTooLarge { n: usize, cap: usize },

    #[error("member of size {found} in a {expected}-uniform family")]
    NotUniform { expected: usize, found: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("(k={k}, s={s}, n={n}) is outside the theorem window: {reason}")]
    OutsideWindow {
        k: u64,
        s: u64,
        n: u64,
        reason: String,
    },

    #[error("{what}: size {size} is above the cap {cap}")]
    TooLarge { what: String, size: u128, cap: u128 },

    #[error(
        "trace is not closed upward: {member} is present but its extension {missing} is not"
    )]
    TraceNotSaturated { member: String, missing: String },
}

pub type Result<T> = std::result::Result<T, Error>;

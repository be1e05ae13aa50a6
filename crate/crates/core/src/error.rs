use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Instance-level invariant violations, one message per violation.
    #[error("invalid instance: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("invalid route: {0}")]
    InvalidRoute(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A vertex carries more chords than an operation allows. The caller is
    /// expected to handle the vertex directly (star harvest) rather than abort.
    #[error("heavy vertex on {side:?} at index {index} with {degree} chords (limit {limit:.2})")]
    HeavyVertex {
        side: crate::section::Side,
        index: u32,
        degree: u64,
        limit: f64,
    },

    #[error("auxiliary matching too small: {found} < {needed}")]
    MatchingTooSmall { found: usize, needed: usize },

    #[error("instance too small: {0}")]
    InstanceTooSmall(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

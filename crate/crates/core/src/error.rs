use thiserror::Error;

/// Errors raised by the exact-arithmetic core.
///
/// Violations found by the checkers are reported as data, never as errors;
/// these variants cover malformed inputs and undefined conditionals only.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UaiError {
    #[error("history length mismatch: {actions} actions, {percepts} percepts")]
    LengthMismatch { actions: usize, percepts: usize },

    #[error("history alternation violated: {0}")]
    Alternation(String),

    #[error("symbol {symbol} outside alphabet of size {size}")]
    SymbolOutOfRange { symbol: u32, size: usize },

    #[error("undefined conditional: zero probability prefix `{prefix}`")]
    UndefinedConditional { prefix: String },

    #[error("undefined normalization: no continuation mass after `{context}`")]
    UndefinedNormalization { context: String },

    #[error("invalid table at context `{context}`: {reason}")]
    InvalidTable { context: String, reason: String },

    #[error("alphabet error: {0}")]
    Alphabet(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid probability `{0}`")]
    ParseProb(String),

    #[error("spec error: {0}")]
    Spec(String),

    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T, E = UaiError> = std::result::Result<T, E>;

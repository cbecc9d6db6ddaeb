use thiserror::Error;

/// Errors raised by the numerical and combinatorial routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A denominator factor vanishes; `vector` names the offending combination.
    #[error("resonant parameters: denominator {vector} evaluates to {magnitude:e}")]
    Resonance { vector: String, magnitude: f64 },

    #[error("evaluation at a pole: {0}")]
    Pole(String),

    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported in this numeric mode: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A truncated sum came out empty.
    #[error("empty fiber at truncation order {order}")]
    EmptyFiber { order: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

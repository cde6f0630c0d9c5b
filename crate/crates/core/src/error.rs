use thiserror::Error;

use crate::linops::Side;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent {0}: must be >= 1 or infinite")]
    InvalidExponent(f64),

    #[error("space dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("space mismatch in {context}: {left} vs {right}")]
    SpaceMismatch {
        context: &'static str,
        left: String,
        right: String,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("family must contain at least one vector")]
    EmptyFamily,

    #[error("{context} requires a family on the {expected} side")]
    WrongSide { context: &'static str, expected: Side },

    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("exponent {p} not supported here: {reason}")]
    UnsupportedExponent { p: String, reason: &'static str },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("envelope violated at term {index}: |f_i|*|g_i| = {product} > envelope {envelope}")]
    EnvelopeViolation {
        index: usize,
        product: f64,
        envelope: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

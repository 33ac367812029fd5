use thiserror::Error;

use crate::numkernel::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "precision starvation: need coefficients below q^{needed}, only known below q^{available}"
    )]
    PrecisionStarvation { needed: i64, available: i64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("eta quotient has non-integral leading exponent {0}")]
    FractionalEtaExponent(Rat),

    #[error("not modular of level one at weight {weight}: residual at q^{exponent}")]
    NotModular { weight: u32, exponent: i64 },

    #[error("c_({n},{m},{i}) = {value} is not an integer")]
    NonIntegral { n: u32, m: u32, i: u32, value: Rat },

    #[error("bound violated at (n={n}, m={m}, i={i:?}): {detail}")]
    BoundViolation {
        n: u32,
        m: u32,
        i: Option<u32>,
        detail: String,
    },

    #[error("internal agreement failure: {0}")]
    Disagreement(String),

    #[error("mlde search needs {needed} equations, only {available} known coefficients")]
    InsufficientMargin { needed: usize, available: usize },

    #[error("state uses mode h(-{0}); only modes 1..=3 are supported")]
    UnsupportedMode(u32),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

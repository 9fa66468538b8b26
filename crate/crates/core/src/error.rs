use thiserror::Error;

use crate::expr::Coord;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no value bound for variable `{0}`")]
    UnboundVariable(Coord),

    #[error("`{0}` has no value in the requested arithmetic")]
    NotRepresentable(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("`{0}` is not an exponential polynomial (exp arguments must be affine)")]
    NotExpPolynomial(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("slot {slot} out of range for a tensor of order {order}")]
    SlotOutOfRange { slot: usize, order: usize },

    #[error("variance mismatch: {0}")]
    Variance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("oracle refuses order {requested}: k_max is {k_max}")]
    OracleOrder { requested: usize, k_max: usize },

    #[error("quadrature did not converge: achieved error {achieved:e}")]
    Quadrature { achieved: f64 },

    #[error("frame normalization failed: {quantity} {detail}")]
    Normalization { quantity: String, detail: String },

    #[error("model order {k} outside 0..={max}")]
    ModelOrder { k: usize, max: usize },

    #[error("contraction scheme error: {0}")]
    Scheme(String),

    #[error("{0} vanishes at this point")]
    ZeroDenominator(String),

    #[error("inadmissible (X, Z0, Θ): {0}")]
    Inadmissible(String),

    #[error("f does not have the z1 z0^2 + ... + psi(z0) shape: {0}")]
    NotPsiShape(String),

    #[error("singular linear system")]
    Singular,

    #[error("isometry precondition failed: {0}")]
    Precondition(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

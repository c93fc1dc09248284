use thiserror::Error;

/// Errors raised by the exact-arithmetic layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported ring parameter m = {0} (expected one of 1, 2, 3, 7, 11)")]
    UnsupportedRing(i64),
    #[error("ring mismatch: m = {0} vs m = {1}")]
    RingMismatch(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("map is not well defined: relation {relation} has image outside the target relation lattice")]
    IllDefinedMap { relation: usize },
    #[error("map is not equivariant under involution {involution}")]
    NotEquivariant { involution: usize },
    #[error("malformed group action: {0}")]
    MalformedAction(String),
    #[error("unsupported character: {0}")]
    UnsupportedCharacter(String),
    #[error("no covering decomposition: {0}")]
    NoCovering(String),
    #[error("move budget of {0} exceeded")]
    BudgetExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

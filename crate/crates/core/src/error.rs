use std::io;

use thiserror::Error;

/// Errors produced by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A point or interval lies outside the state space where it must live.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates the documented precondition of an operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A model component is malformed (e.g. a non-contracting map).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The root bracket hit the state-space boundary before reaching `h`.
    #[error("boundary inconsistency at y = {y}: G(y, {cap}) = {value} < h = {h}")]
    BoundaryInconsistency { y: f64, h: f64, cap: f64, value: f64 },

    /// A chain step overshot the closure of the state space by more than rounding.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure_arg {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Argument(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure_arg;

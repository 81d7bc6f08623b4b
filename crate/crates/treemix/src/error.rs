use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("exact mode infeasible: {what} needs {needed} entries, cap is {cap}")]
    Infeasible {
        what: String,
        needed: u128,
        cap: u128,
    },

    #[error("matrix is not reversible: detailed balance off by {0:e}")]
    NotReversible(f64),

    #[error("matrix is not positive semidefinite: eigenvalue {0:e}")]
    NotPsd(f64),

    #[error("entropy of a negative function")]
    NegativeEntropy,

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("bad input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        reason: reason.into(),
    }
}

/// Default cap on enumerated weights (measure tables).
pub const WEIGHT_CAP: u128 = 1 << 24;
/// Default cap on transition-matrix state counts.
pub const MATRIX_CAP: u128 = 1 << 16;
/// Dense storage is used only up to this many states (`n^2` doubles).
pub const DENSE_CAP: u128 = 1 << 12;

pub(crate) fn check_cap(what: impl Into<String>, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        return Err(Error::Infeasible {
            what: what.into(),
            needed,
            cap,
        });
    }
    Ok(())
}

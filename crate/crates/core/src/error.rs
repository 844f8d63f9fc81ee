use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("lacunary sequence invalid at r = {r}: {reason}")]
    Lacunary { r: usize, reason: String },

    #[error("ratio k_r / k_(r-1) is undefined at r = {0}")]
    UndefinedRatio(usize),

    #[error("lambda sequence invalid at k = {k}: {reason}")]
    Lambda { k: usize, reason: String },

    #[error("{what} index {index} is outside the supplied horizon of length {len}")]
    OutOfHorizon {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("matrix is not a triangle: {0}")]
    NotTriangle(String),

    #[error("sequence has a nonzero entry at index {index}, beyond the last block end {covered}; increase R")]
    UncoveredSupport { index: usize, covered: usize },

    #[error("could not bracket the infimum: {0}")]
    NoBracket(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

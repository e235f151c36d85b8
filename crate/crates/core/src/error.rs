use thiserror::Error;

use crate::fibration::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("vector is not primitive")]
    NotPrimitive,

    #[error("vector is not isotropic (self-intersection {0})")]
    NotIsotropic(String),

    #[error("lift is not orthogonal to the isotropic vector (pairing {0})")]
    NotOrthogonal(String),

    #[error("half-integral entries: c.c is odd on a vector pairing oddly with e")]
    Parity,

    #[error("reflection vector must have self-intersection -2, got {0}")]
    NotRoot(String),

    #[error("matrix does not preserve the Gram matrix")]
    NotIsometry,

    #[error("degenerate Gram matrix (radical rank {radical_rank})")]
    Degenerate { radical_rank: usize },

    #[error("lattice is not negative definite")]
    NotNegativeDefinite,

    #[error("matrix is not in SL2(Z): {0}")]
    NotSl2(String),

    #[error("index {index} out of range for tuple of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("expected base {expected}, got {found}")]
    WrongBase { expected: &'static str, found: &'static str },

    #[error("invalid fibration description: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidDescription(Vec<Violation>),

    #[error("isometry is not unipotent")]
    NotUnipotent,

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Stable machine-readable tag, used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Dimension(_) => "dimension",
            Error::NotPrimitive => "not_primitive",
            Error::NotIsotropic(_) => "not_isotropic",
            Error::NotOrthogonal(_) => "not_orthogonal",
            Error::Parity => "parity",
            Error::NotRoot(_) => "not_root",
            Error::NotIsometry => "not_isometry",
            Error::Degenerate { .. } => "degenerate",
            Error::NotNegativeDefinite => "not_negative_definite",
            Error::NotSl2(_) => "not_sl2",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::WrongBase { .. } => "wrong_base",
            Error::InvalidDescription(_) => "invalid_description",
            Error::NotUnipotent => "not_unipotent",
            Error::Precondition(_) => "precondition",
        }
    }
}

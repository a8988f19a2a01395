use thiserror::Error;

use crate::triangulation::{EdgeId, TriId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    #[error("unknown triangle {0}")]
    UnknownTriangle(TriId),

    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),

    #[error("edge {0} is self-folded (both sides lie in one triangle)")]
    SelfFolded(EdgeId),

    #[error("edge {0} is not in flip position; rotate corners first")]
    NotNormal(EdgeId),

    #[error("move {index} of word is not applicable: {source}")]
    WordStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("domain mismatch: {0}")]
    Domain(String),

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("argument outside convergence strip: {0}")]
    OutsideStrip(String),

    #[error("parse error: {0}")]
    Parse(String),
}

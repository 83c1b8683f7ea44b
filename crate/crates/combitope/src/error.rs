use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// Geometry and lattice code never falls back silently: inputs that violate
/// a precondition (wrong affine dimension, incidence data that cannot come
/// from a polytope, parameters outside a family's range) are hard errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point list")]
    EmptyPointList,

    #[error("points span affine dimension {actual}, expected {expected}")]
    NotFullDimensional { expected: usize, actual: usize },

    #[error("points span affine dimension {actual}, expected {expected} for a hyperplane")]
    NotHyperplane { expected: usize, actual: usize },

    #[error("incidence data is not polytopal: {0}")]
    NotPolytopal(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("vertex sets support at most {max} vertices, got {got}")]
    TooManyVertices { max: usize, got: usize },

    #[error("no valid truncation cut: {0}")]
    CutSearchFailed(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("value out of domain: {0}")]
    OutOfDomain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed certificate: {0}")]
    BadCertificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("dimension {0} is not supported (expected 1 or 2)")]
    UnsupportedDimension(usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("incompatible discretizations: {0}")]
    MeshMismatch(String),

    #[error("grid level {level} is finer than the mesh refinement {refinement}")]
    Misaligned { level: i32, refinement: i32 },

    #[error("invalid sampled function: {0}")]
    InvalidFunction(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("bracket search failed: {0}")]
    BracketFailure(String),

    #[error("grid family enumerates no cubes")]
    EmptyGrid,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

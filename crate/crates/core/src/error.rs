//! Crate error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate polygon edge at index {0}")]
    DegenerateEdge(usize),

    #[error("polygon is invalid: {0}")]
    InvalidPolygon(String),

    #[error("tensor field has no basis tensors")]
    EmptyField,

    #[error("point ({0}, {1}) is outside the field grid")]
    OutOfBounds(f64, f64),

    #[error("fixture seeding failed: no collision-free pose after {attempts} attempts")]
    SeedingFailed { attempts: usize },

    #[error("product {product} does not fit surface ({reason})")]
    DoesNotFit { product: String, reason: String },

    #[error("mesh is empty")]
    EmptyMesh,

    #[error("joint {joint} = {value} outside limits [{lo}, {hi}]")]
    LimitViolation {
        joint: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("scene state mismatch: {0}")]
    StateMismatch(String),

    #[error("unknown id: {0}")]
    UnknownId(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("obj parse error at line {line}: {message}")]
    ObjParse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

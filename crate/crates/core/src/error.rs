use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid resolution {0}: need an even number of cells per axis, at least 4")]
    InvalidResolution(usize),

    #[error("mesh consistency: interior node {node} is missing its neighbor in direction {direction}")]
    MeshConsistency { node: usize, direction: usize },

    #[error("field length {found} does not match mesh node count {expected}")]
    FieldLength { expected: usize, found: usize },

    #[error("fields live on different meshes (N={left} vs N={right})")]
    MeshMismatch { left: usize, right: usize },

    #[error("unit-norm constraint violated at node {node}: |u| = {norm}")]
    ConstraintViolation { node: usize, norm: f64 },

    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },

    #[error("test field {index} does not vanish on the boundary band (node {node})")]
    InvalidTest { index: usize, node: usize },

    #[error("step size error at node {node}: |v| = {norm} after the explicit update")]
    StepSize { node: usize, norm: f64 },

    #[error("penalized flow blew up at node {node}: |w| = {norm}")]
    Instability { node: usize, norm: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("datum is not weakly harmonic: normalized residual {residual:.3e} exceeds gate {threshold:.3e}")]
    NotWeaklyHarmonic { residual: f64, threshold: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("concatenation: {0}")]
    Concatenation(String),

    #[error("snapshot at step {0} is not stored")]
    Storage(usize),

    #[error("discount rate must be positive, got {0}")]
    InvalidRate(f64),

    #[error("no admissible trajectory in the solution set")]
    EmptySolutionSet,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::StepSize { .. }
            | Error::Instability { .. }
            | Error::ConstraintViolation { .. }
            | Error::NonFinite { .. }
            | Error::NotWeaklyHarmonic { .. }
            | Error::EmptySolutionSet => ErrorClass::Numerical,
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

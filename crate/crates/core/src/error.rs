use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: a qudit needs at least two levels")]
    InvalidDimension(usize),
    #[error("not a bijection on 0..{0}")]
    InvalidPermutation(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("parameter vector has length {found}, circuit expects {expected}")]
    ParameterLength { expected: usize, found: usize },
    #[error("input component {index} is not finite")]
    NonFiniteInput { index: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("insufficient data: requested {requested} samples, {available} available")]
    InsufficientData { requested: usize, available: usize },
    #[error("covariance has rank {rank}, cannot extract {requested} components")]
    RankDeficient { rank: usize, requested: usize },
    #[error("state leaks out of the Dicke subspace (residual norm {0:e})")]
    SubspaceLeakage(f64),
}

use std::io;

use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("out of order at line {line}: t={t} precedes previous t={prev}")]
    OutOfOrder { line: usize, t: f64, prev: f64 },

    #[error("negative node-id at line {line}")]
    NegativeNode { line: usize },

    #[error("node-id {node} out of range for {n} nodes")]
    NodeOutOfRange { node: u64, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sketch mismatch: {0}")]
    SketchMismatch(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("generator produced an edgeless graph after {attempts} attempts")]
    EdgelessGraph { attempts: usize },

    #[error("distribution size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("empty distribution")]
    EmptyDistribution,
}

pub type Result<T> = std::result::Result<T, Error>;

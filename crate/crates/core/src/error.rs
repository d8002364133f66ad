use thiserror::Error;

use crate::measures::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("invalid parameters: {}", summarize(.0))]
    Invalid(Vec<Violation>),

    #[error("impossible event: {0}")]
    ImpossibleEvent(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("malformed drawing: {0}")]
    MalformedDrawing(String),

    #[error("inconsistent potential at node {node}: {detail}")]
    InconsistentPotential { node: usize, detail: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("expression error: {0}")]
    Expr(String),

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

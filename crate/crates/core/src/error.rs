use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("line {line}: vertex `{name}` declared twice")]
    DuplicateVertex { line: usize, name: String },

    #[error("line {line}: edge count must be a positive integer or `inf`, got `{literal}`")]
    BadCount { line: usize, literal: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cannot outsplit sink `{0}`")]
    SinkSplit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed monoid generator: {0}")]
    MalformedGenerator(String),

    #[error("cylinder does not belong to this graph: {0}")]
    AmbientMismatch(String),

    #[error("invalid boundary prefix: {0}")]
    InvalidPrefix(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

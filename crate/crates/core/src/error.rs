use thiserror::Error;

/// Errors produced by the ranking toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unknown node label `{label}` on line {line}")]
    UnknownNode { label: String, line: usize },

    #[error("cover violated: node `{0}` belongs to no block")]
    CoverViolated(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("non-finite value encountered during {0}")]
    NonFinite(&'static str),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("model is not block-level separable: edge {from} -> {to} crosses aggregates")]
    NotSeparable { from: usize, to: usize },

    #[error(
        "aggregate {aggregate} receives zero teleport mass; sub-model teleport vector is undefined"
    )]
    ZeroTeleportMass { aggregate: usize },

    #[error("dense size cap exceeded: n = {n} > {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("{0}")]
    Other(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

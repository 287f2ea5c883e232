use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("self-loop ({0}, {0}) rejected")]
    SelfLoop(usize),

    #[error("arc ({u}, {v}) already present with weight {weight} (new weight {new_weight})")]
    Duplicate {
        u: usize,
        v: usize,
        weight: f64,
        new_weight: f64,
    },

    #[error("node {node} out of range for a graph with {n} nodes")]
    UnknownNode { node: usize, n: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("shortest-path count overflow at pair ({s}, {t})")]
    Overflow { s: usize, t: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by malformed input or I/O rather than by the
    /// requested computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io(_))
    }
}

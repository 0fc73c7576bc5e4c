use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid edge {{{u}, {v}}} in a graph on {n} vertices")]
    InvalidEdge { u: usize, v: usize, n: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("capability exceeded: {0}")]
    Capability(String),

    /// The base graph is even; `witness` lists W-side indices meeting every
    /// V-side neighborhood in an even number of vertices.
    #[error("base graph is even (witness of size {})", witness.len())]
    EvenBase { witness: Vec<usize> },

    #[error(
        "no odd base graph after {retries} resamples (observed even rate {even_rate:.3})"
    )]
    RetriesExhausted { retries: usize, even_rate: f64 },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("invalid group or gadget: {0}")]
    Group(String),

    #[error("solver command: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported ambient dimension {0} (only 1, 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("invalid similarity: {0}")]
    InvalidSimilarity(String),

    #[error("invalid polyhedron: {0}")]
    InvalidPolyhedron(String),

    #[error("no similarity maps the source vertices onto the targets (distance ratio spread {spread:.3e})")]
    NoSimilarityExists { spread: f64 },

    #[error("degenerate vertex cone at vertex {0}")]
    DegenerateAngle(usize),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("pieces {first} and {second} overlap (D2 violated)")]
    D2Violated { first: usize, second: usize },

    #[error("depth {depth} needs {pieces} pieces, over the budget of {budget}")]
    DepthTooLarge { depth: usize, pieces: u128, budget: usize },

    #[error("point is not a vertex image up to depth {max_depth}")]
    NotAVertexPoint { max_depth: usize, prefix: Vec<usize> },

    #[error("point has infinitely many addresses (vertex automaton branches on a cycle)")]
    InfiniteAddressSet,

    #[error("no chain connects the two points")]
    Unreachable,

    #[error("junction {junction} is not a vertex image of chain piece {piece}")]
    EntryNotAVertex { piece: usize, junction: String },

    #[error("point is not a node of any skeleton up to depth {0}")]
    NotANode(usize),

    #[error("skeleton depth {skeleton} is smaller than the requested cover depth {requested}")]
    DepthMismatch { skeleton: usize, requested: usize },

    #[error("skeleton at depth {0} is not a tree")]
    NotATree(usize),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("map {index}: {source}")]
    Map {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

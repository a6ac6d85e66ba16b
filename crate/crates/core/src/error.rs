use thiserror::Error;

/// Errors raised by the instance readers, the evaluators and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate node id {0}")]
    DuplicateNode(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("node {node} needs {demand} units but an MHC holds only {capacity}")]
    UnservableNode {
        node: usize,
        demand: f64,
        capacity: f64,
    },

    #[error("position {position} is out of range for route {route} of length {len}")]
    InvalidPosition {
        route: usize,
        position: usize,
        len: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed solution: {0}")]
    MalformedSolution(String),

    #[error("truck order visits resupply node {node} before an earlier resupply on the same route")]
    TruckOrder { node: usize },

    #[error("{what} of size {size} exceeds the enumeration bound {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("trip {trip} of MHC {mhc} carries {demand} units, capacity is {capacity}")]
    TripOverCapacity {
        mhc: usize,
        trip: usize,
        demand: f64,
        capacity: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use crate::graph::NodeId;

/// Errors produced by graph mutation and queries.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("fitness {0} outside [0, 1]")]
    FitnessOutOfRange(f64),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("edge {0}-{1} already present")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node {0} is not live")]
    DeadNode(NodeId),
}

/// Top-level error for generation, attacks, metrics and sweeps.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("empty graph")]
    EmptyGraph,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

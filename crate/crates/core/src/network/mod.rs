//! Quantum network model: a topology of nodes joined by EPR-generating links,
//! and the network state (qubit placement plus the global graph state).

mod state;
mod topology;

pub use state::{LocalOp, MessageKind, NetworkState, TimestepLedger, TraceEvent};
pub use topology::{Link, NetworkTopology, NodeId, TopologyFile};

use thiserror::Error;

use crate::graph_state::{GraphError, QubitId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("topology has no nodes")]
    EmptyTopology,
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-link on {0}")]
    SelfLink(NodeId),
    #[error("topology is disconnected; components: {}", fmt_components(.components))]
    Disconnected { components: Vec<Vec<NodeId>> },
    #[error("no link between {0} and {1}")]
    NoSuchLink(NodeId, NodeId),
    #[error("link {link} already used in timestep {step}")]
    LinkBusy { link: Link, step: u64 },
    #[error("CZ across nodes: {a} at {node_a}, {b} at {node_b}")]
    Locality { a: QubitId, node_a: NodeId, b: QubitId, node_b: NodeId },
    #[error("qubit {0} has no placement")]
    Unplaced(QubitId),
    #[error("could not parse topology: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn fmt_components(components: &[Vec<NodeId>]) -> String {
    components
        .iter()
        .map(|c| format!("[{}]", c.iter().map(NodeId::as_str).collect::<Vec<_>>().join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

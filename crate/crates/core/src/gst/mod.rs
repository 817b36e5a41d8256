//! Graph State Transfer: build the target graph state locally at a root node,
//! then move each qubit's connections along a network path to its node by
//! repeated connection transfer.

mod execute;
mod plan;
mod resource;
mod schedule;

pub use execute::{connection_transfer, execute, make_local_copy};
pub use plan::{center_root, epr_bound, epr_bound_closed_form, plan_shortest, RootChoice};
pub use resource::{build_resource_state, distribute_with_resource, ResourceState};
pub use schedule::{schedule, Advance, Schedule};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_state::{GraphError, GraphState, QubitId};
use crate::network::{Link, NetworkError, NetworkTopology, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GstError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("connection transfer precondition violated: {0}")]
    TransferShape(String),
    #[error("round {round}: {source}")]
    InRound { round: usize, source: Box<GstError> },
    #[error("final network state does not hold the requested graph state")]
    VerificationFailed,
    #[error("bound undefined for n = {n}, s = {s}")]
    BoundDomain { n: u64, s: u64 },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A target graph state together with the node each of its vertices must end
/// up in.
#[derive(Clone, Debug)]
pub struct DistributionRequest {
    topology: Arc<NetworkTopology>,
    target_graph: GraphState,
    assignment: BTreeMap<QubitId, NodeId>,
}

impl DistributionRequest {
    pub fn new(
        topology: Arc<NetworkTopology>,
        target_graph: GraphState,
        assignment: BTreeMap<QubitId, NodeId>,
    ) -> Result<Self, GstError> {
        let mut seen = BTreeSet::new();
        for v in target_graph.vertices() {
            let node = assignment
                .get(&v)
                .ok_or_else(|| GstError::InvalidRequest(format!("vertex {v} has no node")))?;
            if !topology.contains(node) {
                return Err(GstError::InvalidRequest(format!("node {node} is not in the topology")));
            }
            if !seen.insert(node.clone()) {
                return Err(GstError::InvalidRequest(format!("node {node} is assigned twice")));
            }
        }
        if assignment.len() != target_graph.vertex_count() {
            return Err(GstError::InvalidRequest("assignment names vertices outside the target graph".into()));
        }
        Ok(Self { topology, target_graph, assignment })
    }

    /// One target vertex per node of `nodes` (vertex `i` goes to the `i`-th
    /// node in sorted order) with edges given by node pairs.
    pub fn on_nodes(
        topology: Arc<NetworkTopology>,
        nodes: &BTreeSet<NodeId>,
        edges: &[(NodeId, NodeId)],
    ) -> Result<Self, GstError> {
        let index: BTreeMap<&NodeId, u32> = nodes.iter().zip(0u32..).collect();
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let lookup = |n: &NodeId| {
                index
                    .get(n)
                    .copied()
                    .ok_or_else(|| GstError::InvalidRequest(format!("edge endpoint {n} is not a target")))
            };
            pairs.push((lookup(a)?, lookup(b)?));
        }
        let graph = GraphState::from_edges(nodes.len(), &pairs)?;
        let assignment = nodes.iter().zip(0u32..).map(|(n, i)| (QubitId(i), n.clone())).collect();
        Self::new(topology, graph, assignment)
    }

    pub fn topology(&self) -> &Arc<NetworkTopology> {
        &self.topology
    }

    pub fn target_graph(&self) -> &GraphState {
        &self.target_graph
    }

    pub fn assignment(&self) -> &BTreeMap<QubitId, NodeId> {
        &self.assignment
    }

    /// The set `S` of nodes that will share the state.
    pub fn targets(&self) -> BTreeSet<NodeId> {
        self.assignment.values().cloned().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathStrategy {
    Shortest,
    #[serde(rename = "flow")]
    FlowOptimal,
}

impl fmt::Display for PathStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Shortest => "shortest",
            Self::FlowOptimal => "flow",
        })
    }
}

impl FromStr for PathStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shortest" => Ok(Self::Shortest),
            "flow" => Ok(Self::FlowOptimal),
            other => Err(format!("unknown path strategy `{other}`")),
        }
    }
}

/// Root node plus one node path per target. Each path starts at the root and
/// ends at its target; the root's own target has the one-node path `[root]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistributionPlan {
    pub root: NodeId,
    pub paths: BTreeMap<NodeId, Vec<NodeId>>,
    pub strategy: PathStrategy,
}

impl DistributionPlan {
    /// Sum of path lengths in hops: the EPR pairs the plan consumes.
    pub fn epr_cost(&self) -> u64 {
        self.paths.values().map(|p| p.len().saturating_sub(1) as u64).sum()
    }

    /// Targets that need at least one hop.
    pub fn transferred_targets(&self) -> usize {
        self.paths.values().filter(|p| p.len() > 1).count()
    }

    /// How many paths traverse each link.
    pub fn link_usage(&self) -> BTreeMap<Link, usize> {
        let mut usage = BTreeMap::new();
        for path in self.paths.values() {
            for w in path.windows(2) {
                *usage.entry(Link::new(w[0].clone(), w[1].clone())).or_insert(0) += 1;
            }
        }
        usage
    }

    pub fn max_link_usage(&self) -> usize {
        self.link_usage().into_values().max().unwrap_or(0)
    }

    pub fn validate(&self, topology: &NetworkTopology, targets: &BTreeSet<NodeId>) -> Result<(), GstError> {
        if !topology.contains(&self.root) {
            return Err(GstError::InvalidPlan(format!("root {} is not in the topology", self.root)));
        }
        let planned: BTreeSet<NodeId> = self.paths.keys().cloned().collect();
        if &planned != targets {
            return Err(GstError::InvalidPlan("paths do not cover exactly the target set".into()));
        }
        for (target, path) in &self.paths {
            if path.first() != Some(&self.root) || path.last() != Some(target) {
                return Err(GstError::InvalidPlan(format!("path for {target} must run from the root to {target}")));
            }
            if let Some(w) = path.windows(2).find(|w| !topology.has_link(&w[0], &w[1])) {
                return Err(GstError::InvalidPlan(format!("path for {target} uses missing link {}-{}", w[0], w[1])));
            }
        }
        Ok(())
    }
}

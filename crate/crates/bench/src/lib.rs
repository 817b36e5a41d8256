//! Fixtures shared by the benchmarks.

use std::collections::BTreeSet;
use std::sync::Arc;

use gst_core::gst::DistributionRequest;
use gst_core::network::{NetworkTopology, NodeId};
use gst_core::topology_gen::{generate_topology, TopologySpec};

/// A generated topology with every node in the sharing set and a path target
/// graph over the sorted nodes.
pub fn all_nodes_request(spec: &str, seed: u64) -> DistributionRequest {
    let spec: TopologySpec = spec.parse().expect("valid topology spec");
    let topo = Arc::new(generate_topology(&spec, seed).expect("topology generates"));
    let nodes: BTreeSet<NodeId> = topo.nodes().cloned().collect();
    let sorted: Vec<&NodeId> = nodes.iter().collect();
    let edges: Vec<(NodeId, NodeId)> = sorted.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    DistributionRequest::on_nodes(topo, &nodes, &edges).expect("valid request")
}

pub fn topology(spec: &str, seed: u64) -> NetworkTopology {
    generate_topology(&spec.parse().expect("valid topology spec"), seed).expect("topology generates")
}

use std::collections::{BTreeMap, BTreeSet};

use super::{connection_transfer, make_local_copy, DistributionRequest, GstError};
use crate::graph_state::QubitId;
use crate::metrics::{gst_classical_bits, RunReport, BITS_PER_MESSAGE};
use crate::network::{MessageKind, NetworkState, NodeId};

/// Pre-shared pairs between a root and each other sharing node; any graph
/// state on those nodes can later be distributed in one timestep.
#[derive(Clone, Debug)]
pub struct ResourceState {
    pub root: NodeId,
    /// node -> (half held at the root, half held at the node)
    pub pairs: BTreeMap<NodeId, (QubitId, QubitId)>,
    /// EPR pairs spent establishing the pairs along network paths.
    pub build_epr_pairs: u64,
}

impl ResourceState {
    pub fn qubits(&self) -> u64 {
        2 * self.pairs.len() as u64
    }

    /// The sharing set: the root plus every paired node.
    pub fn nodes(&self) -> BTreeSet<NodeId> {
        self.pairs.keys().cloned().chain([self.root.clone()]).collect()
    }
}

/// Establishes one root-anchored pair per node of `nodes` (other than the root)
/// by chaining connection transfers along the shortest path.
pub fn build_resource_state(
    state: &mut NetworkState,
    nodes: &BTreeSet<NodeId>,
    root: &NodeId,
) -> Result<ResourceState, GstError> {
    if !state.topology().contains(root) {
        return Err(GstError::InvalidRequest(format!("root {root} is not in the topology")));
    }
    let before = state.epr_pairs();
    let mut pairs = BTreeMap::new();
    for node in nodes.iter().filter(|n| *n != root) {
        let path = state.topology().shortest_path(root, node)?;
        let (anchor, mut far) = state.generate_epr(&path[0], &path[1])?;
        for hop in path[1..].windows(2) {
            let (b, c) = state.generate_epr(&hop[0], &hop[1])?;
            connection_transfer(state, far, b, c)?;
            far = c;
        }
        pairs.insert(node.clone(), (anchor, far));
    }
    Ok(ResourceState { root: root.clone(), pairs, build_epr_pairs: state.epr_pairs() - before })
}

/// Distributes `req` by consuming the resource pairs: a local copy at the
/// root, then one connection transfer per non-root target, all in a single
/// timestep with no new EPR generation.
pub fn distribute_with_resource(
    state: &mut NetworkState,
    resource: &ResourceState,
    req: &DistributionRequest,
) -> Result<RunReport, GstError> {
    if req.targets() != resource.nodes() {
        return Err(GstError::InvalidRequest("request targets differ from the resource state's nodes".into()));
    }
    let generated_before = state.epr_pairs();
    let copy = make_local_copy(state, req, &resource.root)?;
    let mut consumed = 0u64;
    for (v, node) in req.assignment() {
        let Some(&(anchor, far)) = resource.pairs.get(node) else { continue };
        connection_transfer(state, copy[v], anchor, far)?;
        state.send_classical(MessageKind::MeasurementReport, node, BITS_PER_MESSAGE as u32);
        state.send_classical(MessageKind::CorrectionDirective, node, BITS_PER_MESSAGE as u32);
        consumed += 1;
    }
    debug_assert_eq!(state.epr_pairs(), generated_before);
    if consumed > 0 {
        state.next_timestep();
    }
    if !state.verify_target(req.target_graph(), req.assignment()) {
        return Err(GstError::VerificationFailed);
    }
    Ok(RunReport {
        epr_pairs: consumed,
        timesteps: u64::from(consumed > 0),
        classical_bits: gst_classical_bits(consumed, consumed),
        root_memory_qubits: req.target_graph().vertex_count() as u64,
        resource_qubits: resource.qubits(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology_gen::{generate_topology, TopologySpec};
    use std::sync::Arc;

    #[test]
    fn four_node_resource_has_six_qubits() {
        let topo = Arc::new(generate_topology(&TopologySpec::Line(4), 0).unwrap());
        let nodes: BTreeSet<NodeId> = topo.nodes().cloned().collect();
        let mut s = NetworkState::new(topo.clone());
        let res = build_resource_state(&mut s, &nodes, &"v1".into()).unwrap();
        assert_eq!(res.qubits(), 6);
        assert_eq!(s.live_qubits(), 6);
        assert_eq!(s.entanglement().edge_count(), 3);
        // v0 and v2 are one hop away, v3 is two.
        assert_eq!(res.build_epr_pairs, 4);
        for (node, (anchor, far)) in &res.pairs {
            assert_eq!(s.placement(*anchor), Some(&"v1".into()));
            assert_eq!(s.placement(*far), Some(node));
            assert!(s.entanglement().has_edge(*anchor, *far));
        }

        let edges = [("v0", "v3"), ("v1", "v2"), ("v2", "v3")].map(|(a, b)| (a.into(), b.into()));
        let req = DistributionRequest::on_nodes(topo, &nodes, &edges).unwrap();
        let report = distribute_with_resource(&mut s, &res, &req).unwrap();
        assert_eq!((report.timesteps, report.epr_pairs, report.resource_qubits), (1, 3, 6));
    }

    #[test]
    fn root_only_resource_is_empty() {
        let topo = Arc::new(generate_topology(&TopologySpec::Line(2), 0).unwrap());
        let mut s = NetworkState::new(topo);
        let res = build_resource_state(&mut s, &BTreeSet::from(["v0".into()]), &"v0".into()).unwrap();
        assert_eq!(res.qubits(), 0);
        assert_eq!(s.live_qubits(), 0);
    }
}

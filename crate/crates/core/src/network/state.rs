use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use super::{Link, NetworkError, NetworkTopology, NodeId};
use crate::graph_state::{GraphState, PauliBasis, QubitId};

/// Per-timestep link usage. With `enforce` on, a link serves at most one EPR
/// pair per timestep.
#[derive(Clone, Debug, Default)]
pub struct TimestepLedger {
    pub current_step: u64,
    pub usage: BTreeMap<Link, u32>,
    pub enforce: bool,
}

impl TimestepLedger {
    fn use_link(&mut self, link: &Link) -> Result<(), NetworkError> {
        let count = self.usage.entry(link.clone()).or_insert(0);
        if self.enforce && *count >= 1 {
            return Err(NetworkError::LinkBusy { link: link.clone(), step: self.current_step });
        }
        *count += 1;
        Ok(())
    }
}

/// Operations a node performs on qubits it holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalOp {
    Cz(QubitId, QubitId),
    Measure(QubitId, PauliBasis),
    LocalComplement(QubitId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MessageKind {
    /// A Bell-measurement result from a connection transfer.
    MeasurementReport,
    /// The final correction instruction for the qubit at the end of a path.
    CorrectionDirective,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TraceEvent {
    Timestep { step: u64 },
    Prepare { qubit: QubitId, node: NodeId },
    Epr { link: Link, left: QubitId, right: QubitId },
    Cz { a: QubitId, b: QubitId },
    Measure { qubit: QubitId, basis: PauliBasis },
    LocalComplement { qubit: QubitId },
    Classical { kind: MessageKind, to: NodeId, bits: u32 },
}

/// Topology, qubit placement and the global graph state of the network.
#[derive(Clone, Debug)]
pub struct NetworkState {
    topology: Arc<NetworkTopology>,
    placement: BTreeMap<QubitId, NodeId>,
    entanglement: GraphState,
    ledger: TimestepLedger,
    epr_pairs: u64,
    trace: Vec<TraceEvent>,
}

impl NetworkState {
    pub fn new(topology: Arc<NetworkTopology>) -> Self {
        Self {
            topology,
            placement: BTreeMap::new(),
            entanglement: GraphState::new(),
            ledger: TimestepLedger::default(),
            epr_pairs: 0,
            trace: Vec::new(),
        }
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn topology_arc(&self) -> &Arc<NetworkTopology> {
        &self.topology
    }

    pub fn entanglement(&self) -> &GraphState {
        &self.entanglement
    }

    pub fn ledger(&self) -> &TimestepLedger {
        &self.ledger
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    /// Number of EPR pairs generated so far.
    pub fn epr_pairs(&self) -> u64 {
        self.epr_pairs
    }

    pub fn placement(&self, q: QubitId) -> Option<&NodeId> {
        self.placement.get(&q)
    }

    pub fn qubits_at<'a>(&'a self, node: &'a NodeId) -> impl Iterator<Item = QubitId> + 'a {
        self.placement.iter().filter(move |(_, n)| *n == node).map(|(q, _)| *q)
    }

    pub fn live_qubits(&self) -> usize {
        self.placement.len()
    }

    /// Turns the one-use-per-timestep link discipline on or off.
    pub fn set_link_discipline(&mut self, enforce: bool) {
        self.ledger.enforce = enforce;
    }

    /// Closes the current timestep; all links become available again.
    pub fn next_timestep(&mut self) {
        self.ledger.current_step += 1;
        self.ledger.usage.clear();
        self.trace.push(TraceEvent::Timestep { step: self.ledger.current_step });
    }

    /// Creates a fresh `|+>` qubit held by `node`.
    pub fn prepare_qubit(&mut self, node: &NodeId) -> Result<QubitId, NetworkError> {
        if !self.topology.contains(node) {
            return Err(NetworkError::UnknownNode(node.clone()));
        }
        let q = self.entanglement.add_vertex();
        self.placement.insert(q, node.clone());
        self.trace.push(TraceEvent::Prepare { qubit: q, node: node.clone() });
        Ok(q)
    }

    /// Generates an EPR pair over the link `a`–`b`; returns `(qubit at a,
    /// qubit at b)`.
    pub fn generate_epr(&mut self, a: &NodeId, b: &NodeId) -> Result<(QubitId, QubitId), NetworkError> {
        if !self.topology.has_link(a, b) {
            return Err(NetworkError::NoSuchLink(a.clone(), b.clone()));
        }
        let link = Link::new(a.clone(), b.clone());
        self.ledger.use_link(&link)?;
        let qa = self.entanglement.add_vertex();
        let qb = self.entanglement.add_vertex();
        self.entanglement.toggle_edge(qa, qb)?;
        self.placement.insert(qa, a.clone());
        self.placement.insert(qb, b.clone());
        self.epr_pairs += 1;
        self.trace.push(TraceEvent::Epr { link, left: qa, right: qb });
        Ok((qa, qb))
    }

    fn node_of(&self, q: QubitId) -> Result<&NodeId, NetworkError> {
        if !self.entanglement.contains(q) {
            // Surface tombstoned/unknown ids from the graph layer.
            self.entanglement.neighbors(q)?;
        }
        self.placement.get(&q).ok_or(NetworkError::Unplaced(q))
    }

    pub fn apply_local(&mut self, op: LocalOp) -> Result<(), NetworkError> {
        match op {
            LocalOp::Cz(a, b) => {
                let (na, nb) = (self.node_of(a)?, self.node_of(b)?);
                if na != nb {
                    return Err(NetworkError::Locality { a, node_a: na.clone(), b, node_b: nb.clone() });
                }
                self.entanglement.toggle_edge(a, b)?;
                self.trace.push(TraceEvent::Cz { a, b });
            }
            LocalOp::Measure(q, basis) => {
                self.node_of(q)?;
                self.entanglement.measure(q, basis)?;
                self.placement.remove(&q);
                self.trace.push(TraceEvent::Measure { qubit: q, basis });
            }
            LocalOp::LocalComplement(q) => {
                self.node_of(q)?;
                self.entanglement.local_complement(q)?;
                self.trace.push(TraceEvent::LocalComplement { qubit: q });
            }
        }
        Ok(())
    }

    pub fn send_classical(&mut self, kind: MessageKind, to: &NodeId, bits: u32) {
        self.trace.push(TraceEvent::Classical { kind, to: to.clone(), bits });
    }

    /// True iff there is a bijection from target vertices onto the live qubits
    /// that preserves edges and non-edges and puts every target vertex at its
    /// assigned node.
    pub fn verify_target(&self, target: &GraphState, assignment: &BTreeMap<QubitId, NodeId>) -> bool {
        let vertices: Vec<QubitId> = target.vertices().collect();
        if vertices.len() != self.placement.len() || vertices.iter().any(|v| !assignment.contains_key(v)) {
            return false;
        }
        let candidates: Vec<Vec<QubitId>> = vertices
            .iter()
            .map(|v| self.qubits_at(&assignment[v]).collect())
            .collect();
        let mut image = Vec::with_capacity(vertices.len());
        let mut used = BTreeSet::new();
        self.match_from(0, &vertices, &candidates, target, &mut image, &mut used)
    }

    fn match_from(
        &self,
        i: usize,
        vertices: &[QubitId],
        candidates: &[Vec<QubitId>],
        target: &GraphState,
        image: &mut Vec<QubitId>,
        used: &mut BTreeSet<QubitId>,
    ) -> bool {
        if i == vertices.len() {
            return true;
        }
        for &q in &candidates[i] {
            if used.contains(&q) {
                continue;
            }
            let consistent = (0..i).all(|j| {
                target.has_edge(vertices[i], vertices[j]) == self.entanglement.has_edge(q, image[j])
            });
            if !consistent {
                continue;
            }
            used.insert(q);
            image.push(q);
            if self.match_from(i + 1, vertices, candidates, target, image, used) {
                return true;
            }
            image.pop();
            used.remove(&q);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_nodes() -> NetworkState {
        let topo = NetworkTopology::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![("a".into(), "b".into()), ("b".into(), "c".into())],
        )
        .unwrap();
        NetworkState::new(Arc::new(topo))
    }

    #[test]
    fn epr_generation_and_regeneration() {
        let mut s = two_nodes();
        s.generate_epr(&"a".into(), &"b".into()).unwrap();
        assert_eq!((s.live_qubits(), s.entanglement().edge_count()), (2, 1));
        s.generate_epr(&"b".into(), &"a".into()).unwrap();
        assert_eq!((s.live_qubits(), s.entanglement().edge_count()), (4, 2));
        assert_eq!(s.epr_pairs(), 2);
        assert!(matches!(
            s.generate_epr(&"a".into(), &"c".into()),
            Err(NetworkError::NoSuchLink(..))
        ));
    }

    #[test]
    fn link_discipline_per_timestep() {
        let mut s = two_nodes();
        s.set_link_discipline(true);
        s.generate_epr(&"a".into(), &"b".into()).unwrap();
        assert!(matches!(
            s.generate_epr(&"a".into(), &"b".into()),
            Err(NetworkError::LinkBusy { step: 0, .. })
        ));
        s.generate_epr(&"b".into(), &"c".into()).unwrap();
        s.next_timestep();
        s.generate_epr(&"a".into(), &"b".into()).unwrap();
    }

    #[test]
    fn local_ops_respect_locality() {
        let mut s = two_nodes();
        let x = s.prepare_qubit(&"a".into()).unwrap();
        let y = s.prepare_qubit(&"a".into()).unwrap();
        s.apply_local(LocalOp::Cz(x, y)).unwrap();
        assert!(s.entanglement().has_edge(x, y));
        let z = s.prepare_qubit(&"b".into()).unwrap();
        assert!(matches!(s.apply_local(LocalOp::Cz(x, z)), Err(NetworkError::Locality { .. })));
        s.apply_local(LocalOp::Measure(x, PauliBasis::Y)).unwrap();
        assert!(s.placement(x).is_none());
        assert!(s.apply_local(LocalOp::Measure(x, PauliBasis::Z)).is_err());
    }

    #[test]
    fn verify_target_checks_placement_and_labels() {
        let mut s = two_nodes();
        s.generate_epr(&"a".into(), &"b".into()).unwrap();
        // Target: path v0 - v1 - v2 with v0 at a, v1 at b, v2 at c.
        let target = GraphState::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let assign: BTreeMap<QubitId, NodeId> =
            [(QubitId(0), "a".into()), (QubitId(1), "b".into()), (QubitId(2), "c".into())].into();
        assert!(!s.verify_target(&target, &assign));

        let mut s = two_nodes();
        let (_, b1) = s.generate_epr(&"a".into(), &"b".into()).unwrap();
        let (b2, _) = s.generate_epr(&"b".into(), &"c".into()).unwrap();
        // Fuse the two halves at b: CZ then Y-measure one of them.
        s.apply_local(LocalOp::Cz(b1, b2)).unwrap();
        s.apply_local(LocalOp::Measure(b2, PauliBasis::Y)).unwrap();
        // Y on b2 complements {b1, c1}: the network now holds the path a-b-c.
        let mut g = GraphState::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(s.verify_target(&g, &assign));
        // Same graph, one vertex at the wrong node.
        let wrong: BTreeMap<QubitId, NodeId> =
            [(QubitId(0), "a".into()), (QubitId(1), "b".into()), (QubitId(2), "b".into())].into();
        assert!(!s.verify_target(&g, &wrong));
        // Isomorphic but labels moved: path centred at a instead of b.
        g = GraphState::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(!s.verify_target(&g, &assign));
    }
}

//! Completion-time minimisation by max flow: every link gets capacity `k` in
//! both directions and each sharing node one unit arc to a sink `t`. A flow
//! of value `|S|` decomposes into root-to-S paths using each link at most `k`
//! times.

mod dinic;
mod optimize;

pub use optimize::{min_k_for_root, minimize_completion_time, FlowOptimum, RootCandidates};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::network::{NetworkError, NetworkTopology, NodeId};
use dinic::Dinic;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("sharing set is empty")]
    EmptyTargets,
    #[error("capacity k must be at least 1")]
    ZeroCapacity,
    #[error("flow value {value} is below the demand {demand}; raise k")]
    Insufficient { value: u64, demand: u64 },
    #[error("flow is not conserved at {0}")]
    Unbalanced(FlowNode),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// A vertex of the flow network: a topology node or the synthetic sink.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FlowNode {
    Node(NodeId),
    Sink,
}

impl fmt::Display for FlowNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Node(n) => write!(f, "{n}"),
            Self::Sink => f.write_str("t"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FlowArc {
    pub from: FlowNode,
    pub to: FlowNode,
    pub capacity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowInstance {
    pub source: NodeId,
    pub arcs: Vec<FlowArc>,
    /// Number of unit arcs into the sink.
    pub demand: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowResult {
    pub source: NodeId,
    pub value: u64,
    pub demand: u64,
    /// Flow on each arc of the instance, in instance order.
    pub flows: Vec<(FlowArc, u64)>,
}

impl FlowInstance {
    /// Arbitrary directed arcs between named nodes plus unit arcs from
    /// `terminals` to the sink.
    pub fn from_arcs(source: NodeId, arcs: &[(NodeId, NodeId, u64)], terminals: &[NodeId]) -> Self {
        let mut all: Vec<FlowArc> = arcs
            .iter()
            .map(|(a, b, c)| FlowArc { from: FlowNode::Node(a.clone()), to: FlowNode::Node(b.clone()), capacity: *c })
            .collect();
        all.extend(terminals.iter().map(|s| FlowArc { from: FlowNode::Node(s.clone()), to: FlowNode::Sink, capacity: 1 }));
        Self { source, arcs: all, demand: terminals.len() as u64 }
    }
}

/// Two opposite arcs of capacity `k` per link, one unit arc per target to `t`.
pub fn build_flow_instance(
    topology: &NetworkTopology,
    targets: &BTreeSet<NodeId>,
    k: u64,
    root: &NodeId,
) -> Result<FlowInstance, FlowError> {
    if targets.is_empty() {
        return Err(FlowError::EmptyTargets);
    }
    if k == 0 {
        return Err(FlowError::ZeroCapacity);
    }
    for n in targets.iter().chain([root]) {
        if !topology.contains(n) {
            return Err(NetworkError::UnknownNode(n.clone()).into());
        }
    }
    let mut arcs = Vec::with_capacity(2 * topology.link_count());
    for link in topology.links() {
        let (a, b) = link.endpoints();
        arcs.push((a.clone(), b.clone(), k));
        arcs.push((b.clone(), a.clone(), k));
    }
    let terminals: Vec<NodeId> = targets.iter().cloned().collect();
    Ok(FlowInstance::from_arcs(root.clone(), &arcs, &terminals))
}

/// Maximum flow from the source to `t` by Dinic's algorithm. Flow on opposite
/// arcs is cancelled so at most one direction of a node pair carries flow.
pub fn max_flow(inst: &FlowInstance) -> FlowResult {
    let mut index: BTreeMap<&FlowNode, usize> = BTreeMap::new();
    let source = FlowNode::Node(inst.source.clone());
    let sink = FlowNode::Sink;
    for node in [&source, &sink].into_iter().chain(inst.arcs.iter().flat_map(|a| [&a.from, &a.to])) {
        let next = index.len();
        index.entry(node).or_insert(next);
    }
    let mut dinic = Dinic::new(index.len());
    let handles: Vec<usize> = inst.arcs.iter().map(|a| dinic.add_arc(index[&a.from], index[&a.to], a.capacity)).collect();
    let value = dinic.run(index[&source], index[&sink]);
    let mut flow: Vec<u64> = handles.iter().map(|&h| dinic.flow_on(h)).collect();

    let mut by_pair: BTreeMap<(&FlowNode, &FlowNode), Vec<usize>> = BTreeMap::new();
    for (i, a) in inst.arcs.iter().enumerate() {
        by_pair.entry((&a.from, &a.to)).or_default().push(i);
    }
    for (&(u, v), forward) in &by_pair {
        if u >= v {
            continue;
        }
        let Some(backward) = by_pair.get(&(v, u)) else { continue };
        let f: u64 = forward.iter().map(|&i| flow[i]).sum();
        let b: u64 = backward.iter().map(|&i| flow[i]).sum();
        let cancel = f.min(b);
        for side in [forward, backward] {
            let mut left = cancel;
            for &i in side {
                let d = flow[i].min(left);
                flow[i] -= d;
                left -= d;
            }
        }
    }
    FlowResult {
        source: inst.source.clone(),
        value,
        demand: inst.demand,
        flows: inst.arcs.iter().cloned().zip(flow).collect(),
    }
}

impl FlowResult {
    /// Checks capacity bounds and conservation away from the source and sink.
    pub fn check(&self) -> Result<(), FlowError> {
        let mut balance: BTreeMap<&FlowNode, i64> = BTreeMap::new();
        for (arc, f) in &self.flows {
            if *f > arc.capacity {
                return Err(FlowError::Unbalanced(arc.from.clone()));
            }
            *balance.entry(&arc.from).or_default() -= *f as i64;
            *balance.entry(&arc.to).or_default() += *f as i64;
        }
        let source = FlowNode::Node(self.source.clone());
        for (node, b) in balance {
            let expected = match node {
                FlowNode::Sink => self.value as i64,
                n if *n == source => -(self.value as i64),
                _ => 0,
            };
            if b != expected {
                return Err(FlowError::Unbalanced(node.clone()));
            }
        }
        Ok(())
    }
}

/// Splits a flow of value `demand` into unit root-to-target paths, dropping
/// cycle flows. Each walk follows flow-carrying arcs (sink arc first, then
/// smallest neighbour name); a revisited node closes a cycle, which is removed.
pub fn decompose_flow(result: &FlowResult) -> Result<Vec<Vec<NodeId>>, FlowError> {
    if result.value < result.demand {
        return Err(FlowError::Insufficient { value: result.value, demand: result.demand });
    }
    let mut residual: BTreeMap<&FlowNode, BTreeMap<&FlowNode, u64>> = BTreeMap::new();
    for (arc, f) in &result.flows {
        if *f > 0 {
            *residual.entry(&arc.from).or_default().entry(&arc.to).or_default() += f;
        }
    }
    let source = FlowNode::Node(result.source.clone());
    let sink = FlowNode::Sink;
    let take = |residual: &mut BTreeMap<&FlowNode, BTreeMap<&FlowNode, u64>>, u: &FlowNode, v: &FlowNode, amount: u64| {
        let out = residual.get_mut(u).unwrap();
        let f = out.get_mut(v).unwrap();
        *f -= amount;
        if *f == 0 {
            out.remove(v);
        }
    };

    let mut paths = Vec::with_capacity(result.demand as usize);
    while (paths.len() as u64) < result.demand {
        let mut walk: Vec<&FlowNode> = vec![&source];
        loop {
            let u = *walk.last().unwrap();
            let out = residual.get(u).filter(|o| !o.is_empty()).ok_or_else(|| FlowError::Unbalanced(u.clone()))?;
            let v: &FlowNode = if out.contains_key(&sink) { &sink } else { out.keys().next().copied().unwrap() };
            if *v == FlowNode::Sink {
                walk.push(v);
                break;
            }
            if let Some(pos) = walk.iter().position(|w| *w == v) {
                let cycle: Vec<&FlowNode> = walk[pos..].iter().copied().chain([v]).collect();
                let amount = cycle.windows(2).map(|w| residual[w[0]][w[1]]).min().unwrap();
                for w in cycle.windows(2) {
                    take(&mut residual, w[0], w[1], amount);
                }
                walk.truncate(pos + 1);
                continue;
            }
            walk.push(v);
        }
        for w in walk.windows(2) {
            take(&mut residual, w[0], w[1], 1);
        }
        paths.push(
            walk.iter()
                .filter_map(|n| match n {
                    FlowNode::Node(id) => Some(id.clone()),
                    FlowNode::Sink => None,
                })
                .collect(),
        );
    }
    Ok(paths)
}

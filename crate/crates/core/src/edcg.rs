//! Cost model of the EDCG baseline: an m-qubit GHZ state is distributed over
//! `{s_1..s_m}`, then over `{s_2..s_m}`, and so on down to two qubits. Each
//! GHZ distribution is charged the edges of a Steiner tree over its suffix.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use thiserror::Error;

use crate::metrics::{edcg_classical_bits, edcg_resource_qubits, RunReport};
use crate::network::{Link, NetworkError, NetworkTopology, NodeId};

/// Largest sharing set for which every ordering is tried.
pub const MAX_EXHAUSTIVE: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EdcgError {
    #[error("EDCG needs at least two sharing nodes, got {0}")]
    TooFew(usize),
    #[error("exhaustive ordering supports at most {MAX_EXHAUSTIVE} nodes, got {0}")]
    TooManyForExhaustive(usize),
    #[error("node {0} appears twice in the ordering")]
    Repeated(NodeId),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// How to order the sharing set into `s_1..s_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdcgOrdering {
    Lexicographic,
    /// Cheapest ordering over all permutations (ties: lexicographically first).
    Exhaustive,
    /// Decreasing distance from `anchor`, names breaking ties, so suffixes
    /// shrink towards the anchor; the anchor is `s_m` when it is in the set.
    FarthestFirst { anchor: NodeId },
}

/// Ordered targets plus the Steiner tree charged for each suffix
/// `{s_k..s_m}`, keyed by `k` (1-based, `k < m`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdcgPlan {
    pub order: Vec<NodeId>,
    pub trees: BTreeMap<usize, BTreeSet<Link>>,
}

impl EdcgPlan {
    pub fn epr_pairs(&self) -> u64 {
        self.trees.values().map(|t| t.len() as u64).sum()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            y = std::mem::replace(&mut self.0[y], r);
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Spanning forest of `links` by Kruskal over the given (already sorted) order.
fn kruskal<'a>(nodes: &[&'a NodeId], links: impl IntoIterator<Item = (&'a NodeId, &'a NodeId)>) -> Vec<(usize, usize)> {
    let index: BTreeMap<&NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut uf = UnionFind::new(nodes.len());
    links
        .into_iter()
        .map(|(a, b)| (index[a], index[b]))
        .filter(|&(a, b)| uf.union(a, b))
        .collect()
}

/// Steiner tree over `terminals` by the metric-closure MST 2-approximation:
/// MST of the terminal distance graph, each closure edge expanded to its
/// lexicographic shortest path, an MST of the union, then non-terminal leaves
/// pruned. Fewer than two terminals give the empty tree.
pub fn steiner_tree(topology: &NetworkTopology, terminals: &BTreeSet<NodeId>) -> Result<BTreeSet<Link>, NetworkError> {
    for t in terminals {
        if !topology.contains(t) {
            return Err(NetworkError::UnknownNode(t.clone()));
        }
    }
    if terminals.len() < 2 {
        return Ok(BTreeSet::new());
    }
    let terms: Vec<&NodeId> = terminals.iter().collect();
    let dist: Vec<BTreeMap<NodeId, usize>> = terms.iter().map(|t| topology.distances(t)).collect::<Result<_, _>>()?;
    let mut closure: Vec<(usize, usize, usize)> = Vec::new();
    for (i, from_i) in dist.iter().enumerate() {
        for (j, t) in terms.iter().enumerate().skip(i + 1) {
            closure.push((from_i[*t], i, j));
        }
    }
    closure.sort();
    let mst = kruskal(&terms, closure.iter().map(|&(_, i, j)| (terms[i], terms[j])));

    let mut union = BTreeSet::new();
    for (i, j) in mst {
        let path = topology.shortest_path(terms[i], terms[j])?;
        union.extend(path.windows(2).map(|w| Link::new(w[0].clone(), w[1].clone())));
    }

    let nodes: Vec<&NodeId> = union
        .iter()
        .flat_map(|l| {
            let (a, b) = l.endpoints();
            [a, b]
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let forest = kruskal(&nodes, union.iter().map(Link::endpoints));
    let mut tree: BTreeSet<Link> = forest.into_iter().map(|(a, b)| Link::new(nodes[a].clone(), nodes[b].clone())).collect();

    loop {
        let mut degree: BTreeMap<&NodeId, usize> = BTreeMap::new();
        for l in &tree {
            let (a, b) = l.endpoints();
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
        let leaves: BTreeSet<NodeId> = degree
            .into_iter()
            .filter(|(n, d)| *d == 1 && !terminals.contains(*n))
            .map(|(n, _)| n.clone())
            .collect();
        if leaves.is_empty() {
            return Ok(tree);
        }
        tree.retain(|l| {
            let (a, b) = l.endpoints();
            !leaves.contains(a) && !leaves.contains(b)
        });
    }
}

fn suffix_cost(topology: &NetworkTopology, suffix: &[NodeId]) -> Result<usize, NetworkError> {
    Ok(steiner_tree(topology, &suffix.iter().cloned().collect())?.len())
}

/// Orders the sharing set into `s_1..s_m`.
pub fn edcg_order(
    targets: &BTreeSet<NodeId>,
    topology: &NetworkTopology,
    mode: &EdcgOrdering,
) -> Result<Vec<NodeId>, EdcgError> {
    match mode {
        EdcgOrdering::Lexicographic => Ok(targets.iter().cloned().collect()),
        EdcgOrdering::FarthestFirst { anchor } => {
            let dist = topology.distances(anchor)?;
            let mut order: Vec<NodeId> = targets.iter().cloned().collect();
            for n in &order {
                if !dist.contains_key(n) {
                    return Err(NetworkError::UnknownNode(n.clone()).into());
                }
            }
            order.sort_by(|a, b| dist[b].cmp(&dist[a]).then_with(|| a.cmp(b)));
            Ok(order)
        }
        EdcgOrdering::Exhaustive => {
            if targets.len() > MAX_EXHAUSTIVE {
                return Err(EdcgError::TooManyForExhaustive(targets.len()));
            }
            exhaustive_order(targets, topology)
        }
    }
}

/// Like [`edcg_order`], but an oversized exhaustive request falls back to
/// lexicographic order with a warning.
pub fn edcg_order_or_fallback(
    targets: &BTreeSet<NodeId>,
    topology: &NetworkTopology,
    mode: &EdcgOrdering,
) -> Result<Vec<NodeId>, EdcgError> {
    match edcg_order(targets, topology, mode) {
        Err(EdcgError::TooManyForExhaustive(m)) => {
            warn!("exhaustive EDCG ordering over {m} nodes is too large; using lexicographic order");
            edcg_order(targets, topology, &EdcgOrdering::Lexicographic)
        }
        other => other,
    }
}

/// Subset dynamic program: the cost of an ordering is the sum of the Steiner
/// costs of its suffix sets, so the best ordering removes, at each step, the
/// smallest-named node that keeps the remaining optimum.
fn exhaustive_order(targets: &BTreeSet<NodeId>, topology: &NetworkTopology) -> Result<Vec<NodeId>, EdcgError> {
    let nodes: Vec<NodeId> = targets.iter().cloned().collect();
    let m = nodes.len();
    let full = (1usize << m) - 1;
    let subset = |mask: usize| -> Vec<NodeId> { (0..m).filter(|i| mask >> i & 1 == 1).map(|i| nodes[i].clone()).collect() };
    // best[mask] = min total cost of ordering the suffix set `mask`.
    let mut best = vec![0usize; full + 1];
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let here = suffix_cost(topology, &subset(mask))?;
        let rest = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| best[mask & !(1 << i)]).min().unwrap();
        best[mask] = here + rest;
    }
    let mut order = Vec::with_capacity(m);
    let mut mask = full;
    while mask != 0 {
        let pick = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .min_by_key(|&i| best[mask & !(1 << i)])
            .unwrap();
        order.push(nodes[pick].clone());
        mask &= !(1 << pick);
    }
    Ok(order)
}

/// Steiner trees for every suffix of `order` with at least two nodes.
pub fn edcg_plan(topology: &NetworkTopology, order: &[NodeId]) -> Result<EdcgPlan, EdcgError> {
    if order.len() < 2 {
        return Err(EdcgError::TooFew(order.len()));
    }
    let mut seen = BTreeSet::new();
    for n in order {
        if !seen.insert(n) {
            return Err(EdcgError::Repeated(n.clone()));
        }
    }
    let mut trees = BTreeMap::new();
    for k in 0..order.len() - 1 {
        let suffix: BTreeSet<NodeId> = order[k..].iter().cloned().collect();
        trees.insert(k + 1, steiner_tree(topology, &suffix)?);
    }
    Ok(EdcgPlan { order: order.to_vec(), trees })
}

/// Modeled EDCG costs for the ordering `order`.
pub fn edcg_cost(topology: &NetworkTopology, order: &[NodeId]) -> Result<RunReport, EdcgError> {
    let plan = edcg_plan(topology, order)?;
    let m = order.len() as u64;
    let epr_pairs = plan.epr_pairs();
    Ok(RunReport {
        epr_pairs,
        timesteps: m - 1,
        classical_bits: edcg_classical_bits(epr_pairs, m),
        root_memory_qubits: 0,
        resource_qubits: edcg_resource_qubits(m),
    })
}

/// `sum_k distance(s_m, s_k)`: each suffix GHZ must at least reach from `s_m`
/// to `s_k`, so no EDCG ordering ending in `s_m` can cost less.
pub fn suffix_lower_bound(topology: &NetworkTopology, order: &[NodeId]) -> Result<u64, NetworkError> {
    let Some(last) = order.last() else { return Ok(0) };
    let dist = topology.distances(last)?;
    order[..order.len() - 1]
        .iter()
        .map(|n| dist.get(n).map(|&d| d as u64).ok_or_else(|| NetworkError::UnknownNode(n.clone())))
        .sum()
}

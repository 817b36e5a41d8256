use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{build_flow_instance, decompose_flow, max_flow, FlowError, FlowResult};
use crate::gst::{DistributionPlan, PathStrategy};
use crate::network::{NetworkTopology, NodeId};

/// Which roots to try.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootCandidates {
    All,
    /// The sharing set plus every minimum-eccentricity node; a heuristic for
    /// large graphs.
    TargetsAndCenters,
    Fixed(NodeId),
}

#[derive(Clone, Debug)]
pub struct FlowOptimum {
    pub root: NodeId,
    /// Smallest per-link use bound achievable from `root`.
    pub k: u64,
    /// Smallest feasible `k` for every candidate root.
    pub per_root: BTreeMap<NodeId, u64>,
    pub flow: FlowResult,
    pub plan: DistributionPlan,
    /// True when not every node was tried.
    pub heuristic: bool,
}

/// Smallest `k` in `1..=|S|` whose flow instance from `root` saturates the
/// demand, found by binary search, together with that maximum flow.
pub fn min_k_for_root(
    topology: &NetworkTopology,
    targets: &BTreeSet<NodeId>,
    root: &NodeId,
) -> Result<(u64, FlowResult), FlowError> {
    let demand = targets.len() as u64;
    let solve = |k: u64| -> Result<FlowResult, FlowError> { Ok(max_flow(&build_flow_instance(topology, targets, k, root)?)) };
    let top = solve(demand.max(1))?;
    if top.value < demand {
        return Err(FlowError::Insufficient { value: top.value, demand });
    }
    let (mut lo, mut hi, mut best) = (1, demand.max(1), top);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let r = solve(mid)?;
        if r.value == demand {
            hi = mid;
            best = r;
        } else {
            lo = mid + 1;
        }
    }
    // `best` always holds the flow for the current `hi`, which is now `lo`.
    Ok((lo, best))
}

fn centers(topology: &NetworkTopology) -> BTreeSet<NodeId> {
    let ecc: Vec<(usize, &NodeId)> =
        topology.nodes().map(|n| (topology.eccentricity(n).expect("node of the topology"), n)).collect();
    let min = ecc.iter().map(|e| e.0).min().unwrap_or(0);
    ecc.into_iter().filter(|e| e.0 == min).map(|e| e.1.clone()).collect()
}

/// Tries each candidate root in parallel and keeps the one with the smallest
/// `k` (ties to the smallest name), with its decomposed flow as the plan.
pub fn minimize_completion_time(
    topology: &NetworkTopology,
    targets: &BTreeSet<NodeId>,
    candidates: &RootCandidates,
) -> Result<FlowOptimum, FlowError> {
    if targets.is_empty() {
        return Err(FlowError::EmptyTargets);
    }
    let roots: Vec<NodeId> = match candidates {
        RootCandidates::All => topology.nodes().cloned().collect(),
        RootCandidates::TargetsAndCenters => targets.union(&centers(topology)).cloned().collect(),
        RootCandidates::Fixed(r) => vec![r.clone()],
    };
    let solved: Vec<(NodeId, u64, FlowResult)> = roots
        .into_par_iter()
        .map(|r| min_k_for_root(topology, targets, &r).map(|(k, f)| (r, k, f)))
        .collect::<Result<_, _>>()?;
    let per_root = solved.iter().map(|(r, k, _)| (r.clone(), *k)).collect();
    let (root, k, flow) = solved
        .into_iter()
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
        .expect("at least one candidate root");
    let paths = decompose_flow(&flow)?
        .into_iter()
        .map(|p| (p.last().expect("paths start at the root").clone(), p))
        .collect();
    let plan = DistributionPlan { root: root.clone(), paths, strategy: PathStrategy::FlowOptimal };
    Ok(FlowOptimum {
        root,
        k,
        per_root,
        flow,
        plan,
        heuristic: *candidates == RootCandidates::TargetsAndCenters,
    })
}

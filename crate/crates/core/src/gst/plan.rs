use super::{DistributionPlan, DistributionRequest, GstError, PathStrategy};
use crate::network::{NetworkTopology, NodeId};

/// Whether the caller is stuck with a given root or may pick the best one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootChoice {
    Fixed,
    Free,
}

/// A minimum-eccentricity node, smallest name first on ties.
pub fn center_root(topology: &NetworkTopology) -> NodeId {
    let mut best: Option<(usize, &NodeId)> = None;
    for n in topology.nodes() {
        let ecc = topology.eccentricity(n).expect("node comes from the topology");
        if best.is_none_or(|(b, _)| ecc < b) {
            best = Some((ecc, n));
        }
    }
    best.expect("topology is non-empty").1.clone()
}

/// Lexicographically smallest shortest path from `root` to every target.
pub fn plan_shortest(req: &DistributionRequest, root: &NodeId) -> Result<DistributionPlan, GstError> {
    let topo = req.topology();
    if !topo.contains(root) {
        return Err(GstError::InvalidPlan(format!("root {root} is not in the topology")));
    }
    let paths = req
        .targets()
        .into_iter()
        .map(|t| Ok((t.clone(), topo.shortest_path(root, &t)?)))
        .collect::<Result<_, GstError>>()?;
    Ok(DistributionPlan { root: root.clone(), paths, strategy: PathStrategy::Shortest })
}

/// Upper bound on EPR pairs for `s` targets in an `n`-node connected network.
///
/// With a fixed root the `j`-th farthest target is at most `n - j` hops away,
/// giving `s(2n - s - 1)/2`. With a free root a centre is within
/// `ceil((n-1)/2)` of every node, so each term is additionally capped.
pub fn epr_bound(n: u64, s: u64, choice: RootChoice) -> Result<u64, GstError> {
    if n == 0 || s == 0 || s > n {
        return Err(GstError::BoundDomain { n, s });
    }
    Ok(match choice {
        RootChoice::Fixed => s * (2 * n - s - 1) / 2,
        RootChoice::Free => {
            let radius = n / 2;
            (1..=s).map(|j| (n - j).min(radius)).sum()
        }
    })
}

/// The free-root, all-nodes bound in closed form:
/// `(3n^2 - 2n)/8` for even `n`, `(3n^2 - 4n + 1)/8` for odd `n`.
pub fn epr_bound_closed_form(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        (3 * n * n - 2 * n) / 8
    } else {
        (3 * n * n + 1 - 4 * n) / 8
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology_gen::{generate_topology, TopologySpec};
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn request_all(topo: NetworkTopology) -> DistributionRequest {
        let nodes: BTreeSet<NodeId> = topo.nodes().cloned().collect();
        DistributionRequest::on_nodes(Arc::new(topo), &nodes, &[]).unwrap()
    }

    #[test]
    fn bound_values() {
        assert_eq!(epr_bound(4, 4, RootChoice::Free).unwrap(), 5);
        assert_eq!(epr_bound(5, 5, RootChoice::Free).unwrap(), 7);
        assert_eq!(epr_bound(4, 4, RootChoice::Fixed).unwrap(), 6);
        assert!(epr_bound(3, 4, RootChoice::Fixed).is_err());
        assert!(epr_bound(3, 0, RootChoice::Fixed).is_err());
    }

    #[test]
    fn capped_sum_matches_closed_forms() {
        for n in 1..200 {
            assert_eq!(epr_bound(n, n, RootChoice::Free).unwrap(), epr_bound_closed_form(n), "n = {n}");
            assert_eq!(epr_bound(n, n, RootChoice::Fixed).unwrap(), n * (n - 1) / 2);
        }
        // The even bound dominates the odd one.
        for n in 1..100u64 {
            assert!((3 * n * n - 2 * n) >= (3 * n * n + 1 - 4 * n));
        }
    }

    #[test]
    fn center_examples() {
        let line = generate_topology(&TopologySpec::Line(5), 0).unwrap();
        let c = center_root(&line);
        assert_eq!(c, NodeId::from("v2"));
        assert_eq!(line.eccentricity(&c).unwrap(), 2);

        let star = NetworkTopology::new(
            ["a", "b", "c", "hub"].map(NodeId::from),
            ["a", "b", "c"].map(|l| (NodeId::from("hub"), NodeId::from(l))),
        )
        .unwrap();
        assert_eq!(center_root(&star), NodeId::from("hub"));
    }

    #[test]
    fn center_of_binary_tree_by_all_pairs() {
        let tree = generate_topology(&TopologySpec::Tree(3), 0).unwrap();
        let c = center_root(&tree);
        // Brute force: eccentricity of every node from all-pairs distances.
        let ecc: Vec<(usize, NodeId)> = tree
            .nodes()
            .map(|n| (tree.nodes().map(|m| tree.distance(n, m).unwrap()).max().unwrap(), n.clone()))
            .collect();
        let min = ecc.iter().map(|e| e.0).min().unwrap();
        assert_eq!(min, 3);
        assert_eq!(ecc.iter().filter(|e| e.0 == 3).count(), 1);
        assert_eq!(c, crate::topology_gen::tree_root());
    }

    #[test]
    fn line_end_root_costs_triangle_number() {
        let line = generate_topology(&TopologySpec::Line(4), 0).unwrap();
        let req = request_all(line);
        let plan = plan_shortest(&req, &"v0".into()).unwrap();
        let costs: Vec<usize> = plan.paths.values().map(|p| p.len() - 1).collect();
        assert_eq!(costs, vec![0, 1, 2, 3]);
        assert_eq!(plan.epr_cost(), 6);
    }

    #[test]
    fn tree_paths_are_the_unique_tree_paths() {
        let tree = generate_topology(&TopologySpec::Tree(3), 0).unwrap();
        let req = request_all(tree.clone());
        let root = crate::topology_gen::tree_root();
        let plan = plan_shortest(&req, &root).unwrap();
        plan.validate(&tree, &req.targets()).unwrap();
        assert_eq!(plan.paths[&root], vec![root.clone()]);
        assert_eq!(plan.epr_cost(), 34);
    }
}

use std::collections::BTreeSet;
use std::sync::Arc;

use gst_core::edcg::{edcg_cost, edcg_order, EdcgOrdering};
use gst_core::flow::{minimize_completion_time, RootCandidates};
use gst_core::gst::{
    build_resource_state, center_root, distribute_with_resource, epr_bound, execute, plan_shortest, schedule,
    DistributionRequest, RootChoice,
};
use gst_core::network::{NetworkState, NetworkTopology, NodeId};
use gst_core::topology_gen::random_connected;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A connected topology, a sharing set and a random target graph on it.
fn instance(seed: u64, n: usize, density: f64) -> (Arc<NetworkTopology>, DistributionRequest, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topo = Arc::new(random_connected(n, density, &mut rng));
    let nodes: Vec<NodeId> = topo.nodes().cloned().collect();
    let size = rng.gen_range(1..=n);
    let targets: BTreeSet<NodeId> = nodes.choose_multiple(&mut rng, size).cloned().collect();
    let mut edges = Vec::new();
    for a in &targets {
        for b in targets.range(a.clone()..).skip(1) {
            if rng.gen_bool(0.4) {
                edges.push((a.clone(), b.clone()));
            }
        }
    }
    let req = DistributionRequest::on_nodes(topo.clone(), &targets, &edges).unwrap();
    (topo, req, rng)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn epr_count_is_total_path_length(seed in any::<u64>(), n in 1usize..9, density in 0.0f64..0.6) {
        let (topo, req, mut rng) = instance(seed, n, density);
        let root = topo.nodes().cloned().collect::<Vec<_>>().choose(&mut rng).unwrap().clone();
        let plan = plan_shortest(&req, &root).unwrap();
        let sched = schedule(&plan);
        let (_, report) = execute(NetworkState::new(topo.clone()), &req, &plan, &sched).unwrap();
        let hops: usize = plan.paths.values().map(|p| p.len() - 1).sum();
        prop_assert_eq!(report.epr_pairs, hops as u64);
        prop_assert!(sched.is_valid_for(&plan));
        prop_assert!(sched.len() <= plan.transferred_targets());
        prop_assert!(sched.len() <= n.saturating_sub(1));
    }

    #[test]
    fn center_root_meets_free_bound(seed in any::<u64>(), n in 1usize..9, density in 0.0f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topo = Arc::new(random_connected(n, density, &mut rng));
        let all: BTreeSet<NodeId> = topo.nodes().cloned().collect();
        let req = DistributionRequest::on_nodes(topo.clone(), &all, &[]).unwrap();
        let plan = plan_shortest(&req, &center_root(&topo)).unwrap();
        let bound = epr_bound(n as u64, n as u64, RootChoice::Free).unwrap();
        prop_assert!(plan.epr_cost() <= bound);
        let fixed = epr_bound(n as u64, n as u64, RootChoice::Fixed).unwrap();
        for root in &all {
            prop_assert!(plan_shortest(&req, root).unwrap().epr_cost() <= fixed);
        }
    }

    #[test]
    fn gst_from_last_target_never_exceeds_edcg(seed in any::<u64>(), n in 2usize..9, density in 0.0f64..0.6) {
        let (topo, req, _) = instance(seed, n, density);
        let targets = req.targets();
        prop_assume!(targets.len() >= 2);
        let order = edcg_order(&targets, &topo, &EdcgOrdering::Lexicographic).unwrap();
        let plan = plan_shortest(&req, order.last().unwrap()).unwrap();
        prop_assert!(plan.epr_cost() <= edcg_cost(&topo, &order).unwrap().epr_pairs);
    }

    #[test]
    fn resource_mode_takes_one_timestep(seed in any::<u64>(), n in 2usize..9, density in 0.0f64..0.6) {
        let (topo, req, _) = instance(seed, n, density);
        let targets = req.targets();
        let root = targets.iter().next().unwrap().clone();
        let mut state = NetworkState::new(topo);
        let resource = build_resource_state(&mut state, &targets, &root).unwrap();
        let report = distribute_with_resource(&mut state, &resource, &req).unwrap();
        let m = targets.len() as u64;
        prop_assert_eq!(report.epr_pairs, m - 1);
        prop_assert_eq!(report.timesteps, u64::from(m > 1));
        prop_assert_eq!(report.resource_qubits, 2 * (m - 1));
    }

    #[test]
    fn flow_plans_respect_k(seed in any::<u64>(), n in 1usize..8, density in 0.0f64..0.6) {
        let (topo, req, _) = instance(seed, n, density);
        let opt = minimize_completion_time(&topo, &req.targets(), &RootCandidates::All).unwrap();
        prop_assert!(opt.plan.max_link_usage() as u64 <= opt.k);
        let sched = schedule(&opt.plan);
        let (_, report) = execute(NetworkState::new(topo.clone()), &req, &opt.plan, &sched).unwrap();
        prop_assert_eq!(report.epr_pairs, opt.plan.epr_cost());
        // The chosen k is never worse than what the shortest-path plan from
        // the same root already achieves.
        let shortest = plan_shortest(&req, &opt.root).unwrap();
        prop_assert!(opt.k <= (shortest.max_link_usage() as u64).max(1));
    }
}

/// Rounds achieved by the greedy scheduler against the flow bound `k`. Rounds
/// above `k` are reported, not treated as failures.
#[test]
fn scheduler_rounds_against_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut total, mut above, mut worst) = (0, 0, 0);
    for i in 0..300 {
        let n = 3 + i % 6;
        let topo = random_connected(n, [0.0, 0.15, 0.3][i % 3], &mut rng);
        let all: BTreeSet<NodeId> = topo.nodes().cloned().collect();
        let opt = minimize_completion_time(&topo, &all, &RootCandidates::All).unwrap();
        let rounds = schedule(&opt.plan).len() as u64;
        total += 1;
        if rounds > opt.k.max(1) && opt.plan.transferred_targets() > 0 {
            above += 1;
            worst = worst.max(rounds - opt.k);
        }
    }
    println!("greedy rounds exceeded k in {above} of {total} instances (worst excess {worst})");
}

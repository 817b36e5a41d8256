use std::collections::BTreeMap;

use super::{DistributionPlan, DistributionRequest, GstError, Schedule};
use crate::graph_state::{PauliBasis, QubitId};
use crate::metrics::{gst_classical_bits, RunReport, BITS_PER_MESSAGE};
use crate::network::{LocalOp, MessageKind, NetworkState, NodeId};

/// Moves the connections of `a` onto `c` by consuming the pair `b`–`c`:
/// `CZ(a, b)`, then Y-measure `a`, then Y-measure `b`.
///
/// Requires `a` and `b` in the same node, `b`'s only neighbour to be `c`, and
/// `a` not adjacent to `b`. Afterwards `c`'s neighbourhood is its old one
/// (without `b`) symmetric-differenced with `a`'s old neighbourhood minus `c`.
pub fn connection_transfer(state: &mut NetworkState, a: QubitId, b: QubitId, c: QubitId) -> Result<(), GstError> {
    if a == b || a == c || b == c {
        return Err(GstError::TransferShape(format!("{a}, {b}, {c} must be distinct")));
    }
    let g = state.entanglement();
    let b_nbrs = g.neighbors(b)?;
    if b_nbrs.len() != 1 || !b_nbrs.contains(&c) {
        return Err(GstError::TransferShape(format!("{b} must be entangled with {c} only")));
    }
    if g.has_edge(a, b) {
        return Err(GstError::TransferShape(format!("{a} is already adjacent to {b}")));
    }
    if state.placement(a) != state.placement(b) {
        return Err(GstError::TransferShape(format!("{a} and {b} are not in the same node")));
    }
    state.apply_local(LocalOp::Cz(a, b))?;
    state.apply_local(LocalOp::Measure(a, PauliBasis::Y))?;
    state.apply_local(LocalOp::Measure(b, PauliBasis::Y))?;
    Ok(())
}

/// Prepares the target graph state on fresh qubits at `root` using local CZs
/// only. Returns target vertex -> network qubit.
pub fn make_local_copy(
    state: &mut NetworkState,
    req: &DistributionRequest,
    root: &NodeId,
) -> Result<BTreeMap<QubitId, QubitId>, GstError> {
    let mut copy = BTreeMap::new();
    for v in req.target_graph().vertices() {
        copy.insert(v, state.prepare_qubit(root)?);
    }
    for (u, v) in req.target_graph().edges() {
        state.apply_local(LocalOp::Cz(copy[&u], copy[&v]))?;
    }
    Ok(copy)
}

/// Runs the plan round by round with one use per link per round, then checks
/// the network holds the requested state.
pub fn execute(
    mut state: NetworkState,
    req: &DistributionRequest,
    plan: &DistributionPlan,
    schedule: &Schedule,
) -> Result<(NetworkState, RunReport), GstError> {
    plan.validate(req.topology(), &req.targets())?;
    if !schedule.is_valid_for(plan) {
        return Err(GstError::InvalidPlan("schedule does not cover the plan one link use per round".into()));
    }
    let epr_before = state.epr_pairs();
    state.set_link_discipline(true);

    let copy = make_local_copy(&mut state, req, &plan.root)?;
    let mut carrier: BTreeMap<&NodeId, QubitId> =
        req.assignment().iter().map(|(v, node)| (node, copy[v])).collect();

    for (round, advances) in schedule.rounds.iter().enumerate() {
        let in_round = |e: GstError| GstError::InRound { round, source: Box::new(e) };
        for adv in advances {
            let path = &plan.paths[&adv.target];
            let destination = path.last().unwrap();
            for hop in adv.from..adv.to {
                let (b, c) = state.generate_epr(&path[hop], &path[hop + 1]).map_err(|e| in_round(e.into()))?;
                let a = carrier[&adv.target];
                connection_transfer(&mut state, a, b, c).map_err(in_round)?;
                state.send_classical(MessageKind::MeasurementReport, destination, BITS_PER_MESSAGE as u32);
                carrier.insert(&adv.target, c);
            }
            if adv.to + 1 == path.len() {
                state.send_classical(MessageKind::CorrectionDirective, destination, BITS_PER_MESSAGE as u32);
            }
        }
        state.next_timestep();
    }
    state.set_link_discipline(false);

    if !state.verify_target(req.target_graph(), req.assignment()) {
        return Err(GstError::VerificationFailed);
    }
    let epr_pairs = state.epr_pairs() - epr_before;
    let report = RunReport {
        epr_pairs,
        timesteps: schedule.len() as u64,
        classical_bits: gst_classical_bits(epr_pairs, plan.transferred_targets() as u64),
        root_memory_qubits: req.target_graph().vertex_count() as u64,
        resource_qubits: 0,
    };
    Ok((state, report))
}

//! Checks the graphical rules against state-vector semantics on every
//! connected graph up to four vertices plus random five-vertex graphs.

use gst_core::graph_state::{GraphState, PauliBasis, QubitId};
use gst_core::oracle::{verify_connection_transfer, verify_graphical_rule, verify_teleport_transfer, OracleError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CertifyReport {
    pub exhaustive_graphs: usize,
    pub random_graphs: usize,
    pub checks: usize,
    /// One line per failed check.
    pub failures: Vec<String>,
}

fn connected_graphs(n: usize) -> impl Iterator<Item = GraphState> {
    let pairs: Vec<(u32, u32)> = (0..n as u32).flat_map(|i| (i + 1..n as u32).map(move |j| (i, j))).collect();
    (0u32..1 << pairs.len())
        .map(move |mask| {
            let edges: Vec<(u32, u32)> =
                pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, e)| *e).collect();
            GraphState::from_edges(n, &edges).expect("valid edge list")
        })
        .filter(GraphState::is_connected)
}

fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize) -> GraphState {
    loop {
        let edges: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|i| (i + 1..n as u32).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let g = GraphState::from_edges(n, &edges).expect("valid edge list");
        if g.is_connected() {
            return g;
        }
    }
}

fn check_graph(g: &GraphState, report: &mut CertifyReport) -> Result<(), OracleError> {
    let vertices: Vec<QubitId> = g.vertices().collect();
    let edges = g.edges();
    for &q in &vertices {
        for basis in [PauliBasis::Y, PauliBasis::Z] {
            report.checks += 1;
            if !verify_graphical_rule(g, q, basis)? {
                report.failures.push(format!("{basis:?} measurement of {q} on {edges:?}"));
            }
        }
        let mut with_pair = g.clone();
        let b = with_pair.add_vertex();
        let c = with_pair.add_vertex();
        with_pair.toggle_edge(b, c)?;
        report.checks += 2;
        if !verify_connection_transfer(&with_pair, q, b, c)? {
            report.failures.push(format!("connection transfer of {q} on {edges:?}"));
        }
        if !verify_teleport_transfer(&with_pair, q, b, c)? {
            report.failures.push(format!("teleportation transfer of {q} on {edges:?}"));
        }
    }
    Ok(())
}

pub fn certify_oracle(random_graphs: usize, seed: u64) -> Result<CertifyReport, OracleError> {
    let mut report = CertifyReport { random_graphs, ..CertifyReport::default() };
    for n in 1..=4 {
        for g in connected_graphs(n) {
            report.exhaustive_graphs += 1;
            check_graph(&g, &mut report)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_graphs {
        check_graph(&random_connected_graph(&mut rng, 5), &mut report)?;
    }
    Ok(report)
}

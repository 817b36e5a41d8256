//! Cost metrics shared by the GST executor and the EDCG cost model.

use serde::{Deserialize, Serialize};

/// Bits per Bell-measurement report and per correction directive.
pub const BITS_PER_MESSAGE: u64 = 2;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub epr_pairs: u64,
    pub timesteps: u64,
    pub classical_bits: u64,
    /// Qubits the root holds for the local copy.
    pub root_memory_qubits: u64,
    /// Qubits of a pre-distributed resource state, when one is used.
    pub resource_qubits: u64,
}

/// One report per consumed pair plus one directive per path end.
pub fn gst_classical_bits(epr_pairs: u64, transferred_targets: u64) -> u64 {
    BITS_PER_MESSAGE * epr_pairs + BITS_PER_MESSAGE * transferred_targets
}

/// One report per consumed pair plus one keep/delete directive per edge slot
/// of the complete graph on the `m` sharing nodes.
pub fn edcg_classical_bits(epr_pairs: u64, m: u64) -> u64 {
    BITS_PER_MESSAGE * epr_pairs + BITS_PER_MESSAGE * (m * m.saturating_sub(1) / 2)
}

/// Resource-state qubits for GST with the root inside the sharing set.
pub fn gst_resource_qubits(m: u64) -> u64 {
    2 * m.saturating_sub(1)
}

/// Edge-decorated complete graph: `m` node qubits plus one decoration per edge.
pub fn edcg_resource_qubits(m: u64) -> u64 {
    m * (m + 1) / 2
}

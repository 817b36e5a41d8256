//! Distribution of graph states over quantum networks.
//!
//! The target graph state is prepared at a single root node and each qubit's
//! entanglement is moved to its destination by connection transfer, one EPR
//! pair per hop. Alongside the executor the crate carries a state-vector
//! oracle for the graphical rules, a cost model of the EDCG baseline, and a
//! max-flow search for the root and paths with the shortest completion time.

pub mod edcg;
pub mod flow;
pub mod graph_state;
pub mod gst;
pub mod metrics;
pub mod network;
pub mod oracle;
pub mod topology_gen;

pub use edcg::{edcg_cost, edcg_order, steiner_tree, EdcgError, EdcgOrdering};
pub use flow::{build_flow_instance, decompose_flow, max_flow, minimize_completion_time, FlowError, RootCandidates};
pub use graph_state::{GraphError, GraphState, PauliBasis, QubitId};
pub use gst::{
    center_root, epr_bound, execute, plan_shortest, schedule, DistributionPlan, DistributionRequest, GstError,
    PathStrategy, RootChoice, Schedule,
};
pub use metrics::RunReport;
pub use network::{NetworkError, NetworkState, NetworkTopology, NodeId};
pub use topology_gen::{generate_topology, TopologySpec};

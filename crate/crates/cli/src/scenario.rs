//! Scenario configuration and the end-to-end GST/EDCG run behind `run`,
//! `optimize` and `compare`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use gst_core::edcg::{edcg_cost, edcg_order_or_fallback, EdcgError, EdcgOrdering};
use gst_core::flow::{minimize_completion_time, FlowError, RootCandidates};
use gst_core::gst::{
    center_root, epr_bound, execute, plan_shortest, schedule, DistributionPlan, DistributionRequest, GstError,
    PathStrategy, RootChoice,
};
use gst_core::metrics::{gst_resource_qubits, RunReport};
use gst_core::network::{NetworkError, NetworkState, NetworkTopology, NodeId};
use gst_core::topology_gen::{generate_topology, GenError, TopologySpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<NetworkError> for ScenarioError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::Io(m) => Self::Io(m),
            other => Self::Config(other.to_string()),
        }
    }
}

impl From<GenError> for ScenarioError {
    fn from(e: GenError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<EdcgError> for ScenarioError {
    fn from(e: EdcgError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<FlowError> for ScenarioError {
    fn from(e: FlowError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<GstError> for ScenarioError {
    fn from(e: GstError) -> Self {
        match e {
            GstError::VerificationFailed => Self::Verification(e.to_string()),
            GstError::InRound { .. } | GstError::TransferShape(_) => Self::Verification(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologySource {
    File(PathBuf),
    /// A generator spec such as `tree:3` or `gnp:10:0.3`.
    Generate(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSelector {
    All,
    Nodes(Vec<String>),
    /// This many distinct nodes drawn with the scenario seed.
    Random(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetGraphSpec {
    /// Edges between target nodes.
    Edges(Vec<(String, String)>),
    /// `empty`, `complete`, `path`, `cycle`, `star` or `gnp:P`, over the
    /// targets in sorted order.
    Generate(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RootPolicy {
    Center,
    Fixed(NodeId),
    /// Root and paths from the max-flow search over every node.
    Optimize,
}

impl fmt::Display for RootPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Center => f.write_str("center"),
            Self::Fixed(n) => write!(f, "fixed:{n}"),
            Self::Optimize => f.write_str("optimize"),
        }
    }
}

impl FromStr for RootPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "center" => Ok(Self::Center),
            "optimize" => Ok(Self::Optimize),
            _ => match s.strip_prefix("fixed:") {
                Some(id) if !id.is_empty() => Ok(Self::Fixed(NodeId::new(id))),
                _ => Err(format!("unknown root policy `{s}` (center | fixed:<id> | optimize)")),
            },
        }
    }
}

impl TryFrom<String> for RootPolicy {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RootPolicy> for String {
    fn from(p: RootPolicy) -> Self {
        p.to_string()
    }
}

/// How the EDCG baseline orders the sharing set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdcgOrderMode {
    /// Farthest from the GST root first, so the root (or the target nearest
    /// it) comes last.
    Farthest,
    Lexicographic,
    Exhaustive,
}

impl FromStr for EdcgOrderMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "farthest" => Ok(Self::Farthest),
            "lexicographic" => Ok(Self::Lexicographic),
            "exhaustive" => Ok(Self::Exhaustive),
            _ => Err(format!("unknown EDCG order `{s}` (farthest | lexicographic | exhaustive)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub topology: TopologySource,
    pub targets: TargetSelector,
    pub target_graph: TargetGraphSpec,
    pub root: RootPolicy,
    pub strategy: PathStrategy,
    pub edcg_order: EdcgOrderMode,
    pub seed: u64,
    pub outputs: Outputs,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            topology: TopologySource::Generate("tree:3".into()),
            targets: TargetSelector::All,
            target_graph: TargetGraphSpec::Generate("path".into()),
            root: RootPolicy::Center,
            strategy: PathStrategy::Shortest,
            edcg_order: EdcgOrderMode::Farthest,
            seed: 0,
            outputs: Outputs::default(),
        }
    }
}

/// A scenario file: every field optional, present fields win over flags.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub topology: Option<TopologySource>,
    pub targets: Option<TargetSelector>,
    pub target_graph: Option<TargetGraphSpec>,
    pub root: Option<RootPolicy>,
    pub strategy: Option<PathStrategy>,
    pub edcg_order: Option<EdcgOrderMode>,
    pub seed: Option<u64>,
    pub outputs: Option<Outputs>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))
    }

    /// Overlays the file onto `base`. A relative topology path is resolved
    /// against `dir`.
    pub fn apply(self, mut base: ScenarioConfig, dir: Option<&Path>) -> ScenarioConfig {
        if let Some(mut t) = self.topology {
            if let (TopologySource::File(p), Some(dir)) = (&mut t, dir) {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
            base.topology = t;
        }
        macro_rules! overlay {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { base.$field = v; })* };
        }
        overlay!(targets, target_graph, root, strategy, edcg_order, seed, outputs);
        base
    }
}

/// Everything a scenario run produces.
#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub topology: Arc<NetworkTopology>,
    pub request: DistributionRequest,
    pub plan: DistributionPlan,
    pub rounds: usize,
    /// Per-link use bound from the flow search, when one ran.
    pub k: Option<u64>,
    pub gst: RunReport,
    pub edcg: RunReport,
    pub epr_bound: u64,
    /// EDCG ordering `s_1..s_m`; empty when fewer than two targets.
    pub edcg_order: Vec<NodeId>,
}

impl ScenarioOutcome {
    pub fn n(&self) -> usize {
        self.topology.node_count()
    }

    pub fn s(&self) -> usize {
        self.request.assignment().len()
    }

    /// True when the root is the last EDCG target, the setting in which GST
    /// never uses more EPR pairs than EDCG.
    pub fn root_is_last_target(&self) -> bool {
        self.edcg_order.last() == Some(&self.plan.root)
    }
}

pub fn load_topology(source: &TopologySource, seed: u64) -> Result<NetworkTopology, ScenarioError> {
    match source {
        TopologySource::File(p) => Ok(NetworkTopology::load(p)?),
        TopologySource::Generate(spec) => Ok(generate_topology(&spec.parse::<TopologySpec>()?, seed)?),
    }
}

fn select_targets(
    topo: &NetworkTopology,
    selector: &TargetSelector,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeSet<NodeId>, ScenarioError> {
    let nodes: Vec<NodeId> = topo.nodes().cloned().collect();
    let chosen: BTreeSet<NodeId> = match selector {
        TargetSelector::All => nodes.into_iter().collect(),
        TargetSelector::Nodes(names) => {
            let set: BTreeSet<NodeId> = names.iter().map(|n| NodeId::new(n.as_str())).collect();
            if set.len() != names.len() {
                return Err(ScenarioError::Config("target list repeats a node".into()));
            }
            if let Some(missing) = set.iter().find(|n| !topo.contains(n)) {
                return Err(ScenarioError::Config(format!("target {missing} is not in the topology")));
            }
            set
        }
        TargetSelector::Random(k) => {
            if *k > nodes.len() {
                return Err(ScenarioError::Config(format!("cannot pick {k} targets from {} nodes", nodes.len())));
            }
            nodes.choose_multiple(rng, *k).cloned().collect()
        }
    };
    if chosen.is_empty() {
        return Err(ScenarioError::Config("no target nodes".into()));
    }
    Ok(chosen)
}

fn target_graph(
    targets: &BTreeSet<NodeId>,
    spec: &TargetGraphSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(NodeId, NodeId)>, ScenarioError> {
    let t: Vec<&NodeId> = targets.iter().collect();
    let m = t.len();
    let pair = |i: usize, j: usize| (t[i].clone(), t[j].clone());
    let edges = match spec {
        TargetGraphSpec::Edges(list) => list.iter().map(|(a, b)| (NodeId::new(a.as_str()), NodeId::new(b.as_str()))).collect(),
        TargetGraphSpec::Generate(kind) => match kind.as_str() {
            "empty" => Vec::new(),
            "complete" => (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).map(|(i, j)| pair(i, j)).collect(),
            "path" => (1..m).map(|i| pair(i - 1, i)).collect(),
            "cycle" if m >= 3 => (0..m).map(|i| pair(i, (i + 1) % m)).collect(),
            "cycle" => (1..m).map(|i| pair(i - 1, i)).collect(),
            "star" => (1..m).map(|i| pair(0, i)).collect(),
            other => {
                let p: f64 = other
                    .strip_prefix("gnp:")
                    .and_then(|p| p.parse().ok())
                    .filter(|p| (0.0..=1.0).contains(p))
                    .ok_or_else(|| ScenarioError::Config(format!("unknown target graph `{other}`")))?;
                (0..m)
                    .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                    .filter(|_| rng.gen_bool(p))
                    .map(|(i, j)| pair(i, j))
                    .collect()
            }
        },
    };
    Ok(edges)
}

/// Builds the request for `cfg`; the seed drives both the generator and the
/// random choices.
pub fn build_request(cfg: &ScenarioConfig) -> Result<DistributionRequest, ScenarioError> {
    let topo = Arc::new(load_topology(&cfg.topology, cfg.seed)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let targets = select_targets(&topo, &cfg.targets, &mut rng)?;
    let edges = target_graph(&targets, &cfg.target_graph, &mut rng)?;
    Ok(DistributionRequest::on_nodes(topo, &targets, &edges)?)
}

/// Root and plan for the configured root policy and strategy.
pub fn choose_plan(cfg: &ScenarioConfig, req: &DistributionRequest) -> Result<(DistributionPlan, Option<u64>), ScenarioError> {
    let topo = req.topology();
    let targets = req.targets();
    let fixed = match &cfg.root {
        RootPolicy::Center => Some(center_root(topo)),
        RootPolicy::Fixed(n) => {
            if !topo.contains(n) {
                return Err(ScenarioError::Config(format!("root {n} is not in the topology")));
            }
            Some(n.clone())
        }
        RootPolicy::Optimize => None,
    };
    let flow = match (&fixed, cfg.strategy) {
        (Some(_), PathStrategy::Shortest) => None,
        (Some(r), PathStrategy::FlowOptimal) => Some(minimize_completion_time(topo, &targets, &RootCandidates::Fixed(r.clone()))?),
        (None, _) => Some(minimize_completion_time(topo, &targets, &RootCandidates::All)?),
    };
    match (flow, cfg.strategy) {
        (Some(opt), PathStrategy::FlowOptimal) => Ok((opt.plan, Some(opt.k))),
        (Some(opt), PathStrategy::Shortest) => Ok((plan_shortest(req, &opt.root)?, Some(opt.k))),
        (None, _) => Ok((plan_shortest(req, fixed.as_ref().expect("fixed root without flow search"))?, None)),
    }
}

fn edcg_report(
    cfg: &ScenarioConfig,
    req: &DistributionRequest,
    root: &NodeId,
) -> Result<(RunReport, Vec<NodeId>), ScenarioError> {
    let topo = req.topology();
    let targets = req.targets();
    if targets.len() < 2 {
        return Ok((RunReport::default(), Vec::new()));
    }
    let mode = match cfg.edcg_order {
        EdcgOrderMode::Lexicographic => EdcgOrdering::Lexicographic,
        EdcgOrderMode::Exhaustive => EdcgOrdering::Exhaustive,
        EdcgOrderMode::Farthest => {
            let anchor = if targets.contains(root) {
                root.clone()
            } else {
                let dist = topo.distances(root)?;
                targets.iter().min_by_key(|t| (dist[*t], (*t).clone())).expect("targets are non-empty").clone()
            };
            EdcgOrdering::FarthestFirst { anchor }
        }
    };
    let order = edcg_order_or_fallback(&targets, topo, &mode)?;
    Ok((edcg_cost(topo, &order)?, order))
}

/// Runs GST (simulated and verified) and the EDCG cost model on one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome, ScenarioError> {
    let req = build_request(cfg)?;
    let topo = req.topology().clone();
    let (plan, k) = choose_plan(cfg, &req)?;
    let sched = schedule(&plan);
    let (_, mut gst) = execute(NetworkState::new(topo.clone()), &req, &plan, &sched)?;
    gst.resource_qubits = gst_resource_qubits(req.assignment().len() as u64);
    let choice = match cfg.root {
        RootPolicy::Center => RootChoice::Free,
        // The flow search may settle on any node, so only the any-root bound applies.
        RootPolicy::Fixed(_) | RootPolicy::Optimize => RootChoice::Fixed,
    };
    let bound = epr_bound(topo.node_count() as u64, req.assignment().len() as u64, choice)?;
    let (edcg, edcg_order) = edcg_report(cfg, &req, &plan.root)?;
    Ok(ScenarioOutcome { topology: topo, request: req, rounds: sched.len(), plan, k, gst, edcg, epr_bound: bound, edcg_order })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_policy_parsing() {
        assert_eq!("center".parse::<RootPolicy>().unwrap(), RootPolicy::Center);
        assert_eq!("fixed:v3".parse::<RootPolicy>().unwrap(), RootPolicy::Fixed("v3".into()));
        assert_eq!("optimize".parse::<RootPolicy>().unwrap(), RootPolicy::Optimize);
        assert!("fixed:".parse::<RootPolicy>().is_err());
        assert!("best".parse::<RootPolicy>().is_err());
    }

    #[test]
    fn tree_scenario_numbers() {
        let cfg = ScenarioConfig { root: RootPolicy::Center, ..ScenarioConfig::default() };
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.plan.root, NodeId::from("r"));
        assert_eq!((out.gst.epr_pairs, out.gst.timesteps), (34, 7));
        assert_eq!((out.edcg.epr_pairs, out.edcg.timesteps), (105, 14));
        assert_eq!((out.gst.resource_qubits, out.edcg.resource_qubits), (28, 120));
        assert!(out.root_is_last_target());
    }

    #[test]
    fn single_node_is_all_zero() {
        let cfg = ScenarioConfig { topology: TopologySource::Generate("line:1".into()), ..ScenarioConfig::default() };
        let out = run_scenario(&cfg).unwrap();
        let zero = |r: &RunReport| (r.epr_pairs, r.timesteps, r.classical_bits, r.resource_qubits);
        assert_eq!(zero(&out.gst), (0, 0, 0, 0));
        assert_eq!(zero(&out.edcg), (0, 0, 0, 0));
        assert_eq!(out.epr_bound, 0);
    }

    #[test]
    fn file_overrides_base() {
        let file: ScenarioFile = serde_json::from_str(
            r#"{"topology": {"file": "net.json"}, "root": "fixed:root", "strategy": "flow", "targets": {"nodes": ["s1"]}}"#,
        )
        .unwrap();
        let base = ScenarioConfig { seed: 9, ..ScenarioConfig::default() };
        let cfg = file.apply(base, Some(Path::new("/data")));
        assert_eq!(cfg.topology, TopologySource::File("/data/net.json".into()));
        assert_eq!(cfg.root, RootPolicy::Fixed("root".into()));
        assert_eq!(cfg.strategy, PathStrategy::FlowOptimal);
        assert_eq!(cfg.seed, 9);
        assert!(serde_json::from_str::<ScenarioFile>(r#"{"rooot": "center"}"#).is_err());
    }

    #[test]
    fn random_targets_follow_the_seed() {
        let cfg = ScenarioConfig {
            topology: TopologySource::Generate("gnp:12:0.3".into()),
            targets: TargetSelector::Random(5),
            target_graph: TargetGraphSpec::Generate("gnp:0.5".into()),
            seed: 3,
            ..ScenarioConfig::default()
        };
        let a = build_request(&cfg).unwrap();
        let b = build_request(&cfg).unwrap();
        assert_eq!(a.targets(), b.targets());
        assert_eq!(a.target_graph(), b.target_graph());
        assert_eq!(a.targets().len(), 5);
    }

    #[test]
    fn bad_configs() {
        let bad_target = ScenarioConfig { targets: TargetSelector::Nodes(vec!["nope".into()]), ..ScenarioConfig::default() };
        assert!(matches!(run_scenario(&bad_target), Err(ScenarioError::Config(_))));
        let bad_root = ScenarioConfig { root: RootPolicy::Fixed("nope".into()), ..ScenarioConfig::default() };
        assert!(matches!(run_scenario(&bad_root), Err(ScenarioError::Config(_))));
        let bad_graph = ScenarioConfig { target_graph: TargetGraphSpec::Generate("wheel".into()), ..ScenarioConfig::default() };
        assert!(matches!(run_scenario(&bad_graph), Err(ScenarioError::Config(_))));
        let too_many = ScenarioConfig { targets: TargetSelector::Random(99), ..ScenarioConfig::default() };
        assert!(matches!(run_scenario(&too_many), Err(ScenarioError::Config(_))));
    }
}

//! Deterministic generators for line, binary-tree, grid and G(n, p) topologies.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{NetworkError, NetworkTopology, NodeId};

/// Connectivity attempts for `Gnp` before giving up.
pub const GNP_RETRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TopologySpec {
    Line(usize),
    /// Full binary tree of height `h` (`2^(h+1) - 1` nodes).
    Tree(u32),
    Grid(usize, usize),
    Gnp { n: usize, p: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid topology spec: {0}")]
    Invalid(String),
    #[error("no connected G({n}, {p}) sample within {GNP_RETRIES} attempts")]
    Unsatisfiable { n: usize, p: f64 },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Line(n) => write!(f, "line:{n}"),
            Self::Tree(h) => write!(f, "tree:{h}"),
            Self::Grid(a, b) => write!(f, "grid:{a}x{b}"),
            Self::Gnp { n, p } => write!(f, "gnp:{n}:{p}"),
        }
    }
}

impl FromStr for TopologySpec {
    type Err = GenError;

    /// Accepts `line:N`, `tree:H`, `grid:AxB` and `gnp:N:P`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenError::Invalid(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let spec = match kind {
            "line" => Self::Line(rest.parse().map_err(|_| bad())?),
            "tree" => Self::Tree(rest.parse().map_err(|_| bad())?),
            "grid" => {
                let (a, b) = rest.split_once('x').ok_or_else(bad)?;
                Self::Grid(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)
            }
            "gnp" => {
                let (n, p) = rest.split_once(':').ok_or_else(bad)?;
                Self::Gnp { n: n.parse().map_err(|_| bad())?, p: p.parse().map_err(|_| bad())? }
            }
            _ => return Err(bad()),
        };
        spec.check()?;
        Ok(spec)
    }
}

impl TopologySpec {
    fn check(&self) -> Result<(), GenError> {
        let ok = match *self {
            Self::Line(n) => n >= 1,
            Self::Tree(h) => h <= 20,
            Self::Grid(a, b) => a >= 1 && b >= 1,
            Self::Gnp { n, p } => n >= 1 && (0.0..=1.0).contains(&p),
        };
        if ok {
            Ok(())
        } else {
            Err(GenError::Invalid(self.to_string()))
        }
    }
}

/// Name of the root of any generated binary tree.
pub fn tree_root() -> NodeId {
    NodeId::from("r")
}

/// Zero-padded names `prefix0..prefix{n-1}` that sort in index order.
fn indexed_names(prefix: &str, n: usize) -> Vec<NodeId> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| NodeId::new(format!("{prefix}{i:0width$}"))).collect()
}

/// Builds the topology for `spec`. Only `Gnp` uses `seed`.
pub fn generate_topology(spec: &TopologySpec, seed: u64) -> Result<NetworkTopology, GenError> {
    spec.check()?;
    match *spec {
        TopologySpec::Line(n) => {
            let names = indexed_names("v", n);
            let links: Vec<_> = names.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
            Ok(NetworkTopology::new(names, links)?)
        }
        TopologySpec::Tree(h) => {
            // Nodes are named by their root path: "r", "r0", "r1", "r00", ...
            let mut nodes = vec![tree_root()];
            let mut links = Vec::new();
            let mut level = vec![tree_root()];
            for _ in 0..h {
                let mut next = Vec::with_capacity(level.len() * 2);
                for parent in &level {
                    for bit in ['0', '1'] {
                        let child = NodeId::new(format!("{parent}{bit}"));
                        links.push((parent.clone(), child.clone()));
                        next.push(child);
                    }
                }
                nodes.extend(next.iter().cloned());
                level = next;
            }
            Ok(NetworkTopology::new(nodes, links)?)
        }
        TopologySpec::Grid(a, b) => {
            let (wa, wb) = ((a - 1).to_string().len(), (b - 1).to_string().len());
            let name = |i: usize, j: usize| NodeId::new(format!("g{i:0wa$}_{j:0wb$}"));
            let mut links = Vec::new();
            for i in 0..a {
                for j in 0..b {
                    if i + 1 < a {
                        links.push((name(i, j), name(i + 1, j)));
                    }
                    if j + 1 < b {
                        links.push((name(i, j), name(i, j + 1)));
                    }
                }
            }
            let nodes = (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).map(|(i, j)| name(i, j));
            Ok(NetworkTopology::new(nodes, links)?)
        }
        TopologySpec::Gnp { n, p } => {
            let names = indexed_names("v", n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..GNP_RETRIES {
                let mut links = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if rng.gen_bool(p) {
                            links.push((names[i].clone(), names[j].clone()));
                        }
                    }
                }
                match NetworkTopology::new(names.iter().cloned(), links) {
                    Ok(t) => return Ok(t),
                    Err(NetworkError::Disconnected { .. }) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
            Err(GenError::Unsatisfiable { n, p })
        }
    }
}

/// A random connected topology on `n` nodes: a random spanning tree
/// (random parent for each node in a shuffled order) plus each remaining pair
/// independently with probability `extra_p`.
pub fn random_connected<R: Rng>(n: usize, extra_p: f64, rng: &mut R) -> NetworkTopology {
    let names = indexed_names("v", n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut links = std::collections::BTreeSet::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let (a, b) = (parent.min(order[i]), parent.max(order[i]));
        links.insert((a, b));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !links.contains(&(i, j)) && rng.gen_bool(extra_p) {
                links.insert((i, j));
            }
        }
    }
    NetworkTopology::new(
        names.iter().cloned(),
        links.into_iter().map(|(a, b)| (names[a].clone(), names[b].clone())),
    )
    .expect("spanning tree keeps the topology connected")
}

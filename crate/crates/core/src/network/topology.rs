use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NetworkError;

/// Name of a network node. Ordering is lexicographic on the name and is used
/// for every deterministic tie-break.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Undirected link, stored with the smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link(NodeId, NodeId);

impl Link {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            Self(a, b)
        } else {
            Self(b, a)
        }
    }

    pub fn endpoints(&self) -> (&NodeId, &NodeId) {
        (&self.0, &self.1)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// On-disk topology layout: `{"nodes": [...], "links": [[a, b], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TopologyFile {
    pub nodes: Vec<String>,
    pub links: Vec<(String, String)>,
}

/// A connected, simple, undirected network graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkTopology {
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
    links: BTreeSet<Link>,
}

impl NetworkTopology {
    /// Builds and validates a topology. Duplicate links collapse; self-links,
    /// dangling endpoints and disconnected graphs are rejected.
    pub fn new<N, L>(nodes: N, links: L) -> Result<Self, NetworkError>
    where
        N: IntoIterator<Item = NodeId>,
        L: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adjacency: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for n in nodes {
            if adjacency.insert(n.clone(), BTreeSet::new()).is_some() {
                return Err(NetworkError::DuplicateNode(n));
            }
        }
        if adjacency.is_empty() {
            return Err(NetworkError::EmptyTopology);
        }
        let mut set = BTreeSet::new();
        for (a, b) in links {
            if a == b {
                return Err(NetworkError::SelfLink(a));
            }
            for end in [&a, &b] {
                if !adjacency.contains_key(end) {
                    return Err(NetworkError::UnknownNode(end.clone()));
                }
            }
            adjacency.get_mut(&a).unwrap().insert(b.clone());
            adjacency.get_mut(&b).unwrap().insert(a.clone());
            set.insert(Link::new(a, b));
        }
        let topo = Self { adjacency, links: set };
        let components = topo.components();
        if components.len() > 1 {
            return Err(NetworkError::Disconnected { components });
        }
        Ok(topo)
    }

    pub fn from_file_repr(file: TopologyFile) -> Result<Self, NetworkError> {
        Self::new(
            file.nodes.into_iter().map(NodeId),
            file.links.into_iter().map(|(a, b)| (NodeId(a), NodeId(b))),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let file: TopologyFile = serde_json::from_str(text).map_err(|e| NetworkError::Parse(e.to_string()))?;
        Self::from_file_repr(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NetworkError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| NetworkError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_file_repr(&self) -> TopologyFile {
        TopologyFile {
            nodes: self.nodes().map(|n| n.0.clone()).collect(),
            links: self.links.iter().map(|l| (l.0 .0.clone(), l.1 .0.clone())).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_repr()).expect("topology serialises")
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Nodes in lexicographic order.
    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.adjacency.keys()
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.iter()
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.adjacency.contains_key(n)
    }

    pub fn has_link(&self, a: &NodeId, b: &NodeId) -> bool {
        self.adjacency.get(a).is_some_and(|s| s.contains(b))
    }

    /// Neighbours in lexicographic order.
    pub fn neighbors(&self, n: &NodeId) -> Result<&BTreeSet<NodeId>, NetworkError> {
        self.adjacency.get(n).ok_or_else(|| NetworkError::UnknownNode(n.clone()))
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = BTreeSet::new();
        let mut out = vec![];
        for start in self.adjacency.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = vec![];
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(u) = stack.pop() {
                comp.push(u.clone());
                for v in &self.adjacency[u] {
                    if seen.insert(v) {
                        stack.push(v);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Hop distance from `from` to every node.
    pub fn distances(&self, from: &NodeId) -> Result<BTreeMap<NodeId, usize>, NetworkError> {
        self.neighbors(from)?;
        let mut dist = BTreeMap::from([(from.clone(), 0usize)]);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u];
            for v in &self.adjacency[u] {
                if !dist.contains_key(v) {
                    dist.insert(v.clone(), d + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    pub fn distance(&self, a: &NodeId, b: &NodeId) -> Result<usize, NetworkError> {
        self.neighbors(b)?;
        Ok(self.distances(a)?[b])
    }

    /// The lexicographically smallest among all shortest node sequences from
    /// `from` to `to` (both endpoints included).
    pub fn shortest_path(&self, from: &NodeId, to: &NodeId) -> Result<Vec<NodeId>, NetworkError> {
        self.neighbors(from)?;
        let to_target = self.distances(to)?;
        let mut path = vec![from.clone()];
        let mut cur = from;
        while cur != to {
            let d = to_target[cur];
            cur = self.adjacency[cur]
                .iter()
                .find(|v| to_target[*v] + 1 == d)
                .expect("connected topology has a closer neighbour");
            path.push(cur.clone());
        }
        Ok(path)
    }

    pub fn eccentricity(&self, n: &NodeId) -> Result<usize, NetworkError> {
        Ok(self.distances(n)?.values().copied().max().unwrap_or(0))
    }
}

//! Graph-level representation of graph states.
//!
//! A [`GraphState`] is an undirected simple graph whose vertices are qubits.
//! The four graphical operations (edge toggle, local complementation, and the
//! Z/Y measurement rules) act on it directly; the single-qubit corrections that
//! accompany measurements are not tracked here.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a qubit. Never reused within one [`GraphState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitId(pub u32);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(QubitId),
    #[error("vertex {0} was already measured out")]
    MeasuredVertex(QubitId),
    #[error("self-loop on {0}")]
    SelfLoop(QubitId),
    #[error("vertex {0} already exists or was used before")]
    DuplicateVertex(QubitId),
}

/// Which measurement rule to apply to a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliBasis {
    Y,
    Z,
}

fn canonical(u: QubitId, v: QubitId) -> (QubitId, QubitId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, Debug, Default)]
pub struct GraphState {
    adjacency: BTreeMap<QubitId, BTreeSet<QubitId>>,
    edges: HashSet<(QubitId, QubitId)>,
    tombstones: BTreeSet<QubitId>,
    next_id: u32,
}

impl PartialEq for GraphState {
    /// Two states are equal when they have the same live vertices and edges.
    fn eq(&self, other: &Self) -> bool {
        self.adjacency == other.adjacency
    }
}

impl Eq for GraphState {}

impl GraphState {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` isolated vertices `q0..q{n-1}`.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_vertex();
        }
        g
    }

    /// Vertices `q0..q{n-1}` joined by the given index pairs.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut g = Self::with_vertices(n);
        for &(u, v) in edges {
            let (u, v) = (QubitId(u), QubitId(v));
            if !g.has_edge(u, v) {
                g.toggle_edge(u, v)?;
            }
        }
        Ok(g)
    }

    /// Allocates a fresh, never-before-used vertex.
    pub fn add_vertex(&mut self) -> QubitId {
        let id = QubitId(self.next_id);
        self.next_id += 1;
        self.adjacency.insert(id, BTreeSet::new());
        id
    }

    /// Inserts a vertex with a caller-chosen id.
    pub fn insert_vertex(&mut self, id: QubitId) -> Result<(), GraphError> {
        if self.adjacency.contains_key(&id) || self.tombstones.contains(&id) {
            return Err(GraphError::DuplicateVertex(id));
        }
        self.adjacency.insert(id, BTreeSet::new());
        self.next_id = self.next_id.max(id.0 + 1);
        Ok(())
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.adjacency.contains_key(&q)
    }

    pub fn is_measured(&self, q: QubitId) -> bool {
        self.tombstones.contains(&q)
    }

    fn check(&self, q: QubitId) -> Result<(), GraphError> {
        if self.adjacency.contains_key(&q) {
            Ok(())
        } else if self.tombstones.contains(&q) {
            Err(GraphError::MeasuredVertex(q))
        } else {
            Err(GraphError::UnknownVertex(q))
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Live vertices in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.adjacency.keys().copied()
    }

    /// Edges as `(smaller, larger)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(QubitId, QubitId)> {
        let mut out: Vec<_> = self.edges.iter().copied().collect();
        out.sort_unstable();
        out
    }

    pub fn has_edge(&self, u: QubitId, v: QubitId) -> bool {
        self.edges.contains(&canonical(u, v))
    }

    pub fn neighbors(&self, q: QubitId) -> Result<&BTreeSet<QubitId>, GraphError> {
        self.check(q)?;
        Ok(&self.adjacency[&q])
    }

    pub fn degree(&self, q: QubitId) -> Result<usize, GraphError> {
        self.neighbors(q).map(BTreeSet::len)
    }

    fn flip(&mut self, u: QubitId, v: QubitId) {
        let key = canonical(u, v);
        if self.edges.remove(&key) {
            self.adjacency.get_mut(&u).unwrap().remove(&v);
            self.adjacency.get_mut(&v).unwrap().remove(&u);
        } else {
            self.edges.insert(key);
            self.adjacency.get_mut(&u).unwrap().insert(v);
            self.adjacency.get_mut(&v).unwrap().insert(u);
        }
    }

    /// Adds the edge `(u, v)` if absent and removes it otherwise (a `CZ`).
    pub fn toggle_edge(&mut self, u: QubitId, v: QubitId) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.flip(u, v);
        Ok(())
    }

    /// Complements the subgraph induced by the neighbourhood of `a`.
    pub fn local_complement(&mut self, a: QubitId) -> Result<(), GraphError> {
        let nbrs: Vec<QubitId> = self.neighbors(a)?.iter().copied().collect();
        for (i, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[i + 1..] {
                self.flip(u, v);
            }
        }
        Ok(())
    }

    /// Removes `a` and its incident edges; `a` is tombstoned.
    fn delete(&mut self, a: QubitId) -> Result<(), GraphError> {
        self.check(a)?;
        let nbrs = self.adjacency.remove(&a).unwrap();
        for v in nbrs {
            self.edges.remove(&canonical(a, v));
            self.adjacency.get_mut(&v).unwrap().remove(&a);
        }
        self.tombstones.insert(a);
        Ok(())
    }

    pub fn measure_z(&mut self, a: QubitId) -> Result<(), GraphError> {
        self.delete(a)
    }

    pub fn measure_y(&mut self, a: QubitId) -> Result<(), GraphError> {
        self.local_complement(a)?;
        self.delete(a)
    }

    pub fn measure(&mut self, a: QubitId, basis: PauliBasis) -> Result<(), GraphError> {
        match basis {
            PauliBasis::Y => self.measure_y(a),
            PauliBasis::Z => self.measure_z(a),
        }
    }

    /// True when the live vertices form a single connected component.
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.vertices().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[&u] {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == self.vertex_count()
    }
}

use std::collections::VecDeque;

/// Dinic's blocking-flow max-flow on a dense-index residual graph.
pub(crate) struct Dinic {
    /// (to, residual capacity); edge `e ^ 1` is the reverse of edge `e`.
    edges: Vec<(usize, u64)>,
    adj: Vec<Vec<usize>>,
    level: Vec<Option<usize>>,
    next: Vec<usize>,
}

impl Dinic {
    pub(crate) fn new(nodes: usize) -> Self {
        Self { edges: Vec::new(), adj: vec![Vec::new(); nodes], level: vec![None; nodes], next: vec![0; nodes] }
    }

    /// Adds a directed arc and returns its handle.
    pub(crate) fn add_arc(&mut self, from: usize, to: usize, capacity: u64) -> usize {
        let id = self.edges.len();
        self.edges.push((to, capacity));
        self.edges.push((from, 0));
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow pushed through the arc with handle `id`.
    pub(crate) fn flow_on(&self, id: usize) -> u64 {
        self.edges[id + 1].1
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = None);
        self.level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let (v, cap) = self.edges[e];
                if cap > 0 && self.level[v].is_none() {
                    self.level[v] = Some(self.level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        self.level[t].is_some()
    }

    fn dfs(&mut self, u: usize, t: usize, limit: u64) -> u64 {
        if u == t {
            return limit;
        }
        while self.next[u] < self.adj[u].len() {
            let e = self.adj[u][self.next[u]];
            let (v, cap) = self.edges[e];
            if cap > 0 && self.level[v] == self.level[u].map(|l| l + 1) {
                let pushed = self.dfs(v, t, limit.min(cap));
                if pushed > 0 {
                    self.edges[e].1 -= pushed;
                    self.edges[e ^ 1].1 += pushed;
                    return pushed;
                }
            }
            self.next[u] += 1;
        }
        0
    }

    pub(crate) fn run(&mut self, s: usize, t: usize) -> u64 {
        if s == t {
            return 0;
        }
        let mut total = 0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|n| *n = 0);
            loop {
                let pushed = self.dfs(s, t, u64::MAX);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }
}

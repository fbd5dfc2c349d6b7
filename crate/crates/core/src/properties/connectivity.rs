//! Vertex and edge connectivity.
//!
//! Small `k` take linear-time paths (BFS, articulation points, bridges).
//! Larger `k` use unit-capacity augmenting paths that stop as soon as `k`
//! disjoint paths are found.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectivityMode {
    #[default]
    Vertex,
    Edge,
}

pub(crate) fn is_connected_adj(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

pub fn is_connected(g: &SimpleGraph) -> bool {
    is_connected_adj(&g.adjacency())
}

/// Low-link DFS over a connected graph. Returns (has articulation point,
/// has bridge).
pub(crate) fn cut_structure(adj: &[Vec<usize>]) -> (bool, bool) {
    let n = adj.len();
    if n == 0 {
        return (false, false);
    }
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut parent = vec![UNSEEN; n];
    let mut next_child = vec![0usize; n];
    let mut time = 0;
    let (mut articulation, mut bridge) = (false, false);
    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        let mut stack = vec![root];
        while let Some(&v) = stack.last() {
            if next_child[v] < adj[v].len() {
                let w = adj[v][next_child[v]];
                next_child[v] += 1;
                if disc[w] == UNSEEN {
                    parent[w] = v;
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push(w);
                } else if w != parent[v] {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                let p = parent[v];
                if p != UNSEEN {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        bridge = true;
                    }
                    if p != root && low[v] >= disc[p] {
                        articulation = true;
                    }
                }
            }
        }
        if root_children > 1 {
            articulation = true;
        }
    }
    (articulation, bridge)
}

/// Residual network with paired arcs (`a ^ 1` is the reverse of `a`).
struct UnitNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    next: Vec<usize>,
    cap: Vec<i32>,
    flow: Vec<i32>,
    touched: Vec<usize>,
    // BFS scratch
    pred: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
}

const NIL: usize = usize::MAX;

impl UnitNetwork {
    fn new(nodes: usize) -> Self {
        UnitNetwork {
            head: vec![NIL; nodes],
            to: Vec::new(),
            next: Vec::new(),
            cap: Vec::new(),
            flow: Vec::new(),
            touched: Vec::new(),
            pred: vec![NIL; nodes],
            stamp: vec![0; nodes],
            epoch: 0,
        }
    }

    fn add_arc_pair(&mut self, u: usize, v: usize, cap_uv: i32, cap_vu: i32) {
        for (a, b, c) in [(u, v, cap_uv), (v, u, cap_vu)] {
            self.to.push(b);
            self.next.push(self.head[a]);
            self.cap.push(c);
            self.flow.push(0);
            self.head[a] = self.to.len() - 1;
        }
    }

    fn reset(&mut self) {
        for &a in &self.touched {
            self.flow[a] = 0;
            self.flow[a ^ 1] = 0;
        }
        self.touched.clear();
    }

    /// True iff at least `k` units of flow can be routed from `s` to `t`.
    fn flow_at_least(&mut self, s: usize, t: usize, k: usize) -> bool {
        self.reset();
        let mut found = 0;
        let mut queue = VecDeque::new();
        while found < k {
            self.epoch += 1;
            let epoch = self.epoch;
            queue.clear();
            queue.push_back(s);
            self.stamp[s] = epoch;
            let mut reached = false;
            'bfs: while let Some(v) = queue.pop_front() {
                let mut a = self.head[v];
                while a != NIL {
                    let w = self.to[a];
                    if self.stamp[w] != epoch && self.cap[a] - self.flow[a] > 0 {
                        self.stamp[w] = epoch;
                        self.pred[w] = a;
                        if w == t {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                    a = self.next[a];
                }
            }
            if !reached {
                return false;
            }
            let mut v = t;
            while v != s {
                let a = self.pred[v];
                self.flow[a] += 1;
                self.flow[a ^ 1] -= 1;
                self.touched.push(a);
                v = self.to[a ^ 1];
            }
            found += 1;
        }
        true
    }
}

/// Vertex-split network: vertex `v` becomes `2v -> 2v+1` with capacity 1.
fn vertex_split_network(adj: &[Vec<usize>]) -> UnitNetwork {
    let n = adj.len();
    let mut net = UnitNetwork::new(2 * n);
    for v in 0..n {
        net.add_arc_pair(2 * v, 2 * v + 1, 1, 0);
    }
    for (u, list) in adj.iter().enumerate() {
        for &v in list {
            if u < v {
                net.add_arc_pair(2 * u + 1, 2 * v, 1, 0);
                net.add_arc_pair(2 * v + 1, 2 * u, 1, 0);
            }
        }
    }
    net
}

fn edge_network(adj: &[Vec<usize>]) -> UnitNetwork {
    let mut net = UnitNetwork::new(adj.len());
    for (u, list) in adj.iter().enumerate() {
        for &v in list {
            if u < v {
                net.add_arc_pair(u, v, 1, 1);
            }
        }
    }
    net
}

/// Flow-based vertex test: a minimum-degree vertex against its
/// non-neighbours, then every non-adjacent pair of its neighbours.
fn vertex_k_connected_by_flow(adj: &[Vec<usize>], k: usize) -> bool {
    let n = adj.len();
    let v = (0..n).min_by_key(|&x| adj[x].len()).expect("n > k >= 1");
    let mut net = vertex_split_network(adj);
    let mut is_neighbor = vec![false; n];
    for &w in &adj[v] {
        is_neighbor[w] = true;
    }
    for (w, &adjacent) in is_neighbor.iter().enumerate() {
        if w != v && !adjacent && !net.flow_at_least(2 * v + 1, 2 * w, k) {
            return false;
        }
    }
    let nb = &adj[v];
    for (i, &x) in nb.iter().enumerate() {
        for &y in &nb[i + 1..] {
            if adj[x].binary_search(&y).is_err() && !net.flow_at_least(2 * x + 1, 2 * y, k) {
                return false;
            }
        }
    }
    true
}

fn edge_k_connected_by_flow(adj: &[Vec<usize>], k: usize) -> bool {
    let mut net = edge_network(adj);
    (1..adj.len()).all(|w| net.flow_at_least(0, w, k))
}

pub(crate) fn is_k_connected_adj(adj: &[Vec<usize>], k: usize, mode: ConnectivityMode) -> bool {
    let n = adj.len();
    let min_deg = adj.iter().map(Vec::len).min().unwrap_or(0);
    match mode {
        ConnectivityMode::Vertex => {
            if n <= k || min_deg < k {
                return false;
            }
            match k {
                1 => is_connected_adj(adj),
                2 => is_connected_adj(adj) && !cut_structure(adj).0,
                _ => vertex_k_connected_by_flow(adj, k),
            }
        }
        ConnectivityMode::Edge => {
            if n < 2 || min_deg < k {
                return false;
            }
            match k {
                1 => is_connected_adj(adj),
                2 => is_connected_adj(adj) && !cut_structure(adj).1,
                _ => edge_k_connected_by_flow(adj, k),
            }
        }
    }
}

/// k-connectivity in the vertex (`n > k`, no separating set of fewer than
/// `k` vertices) or edge sense.
pub fn is_k_connected(g: &SimpleGraph, k: usize, mode: ConnectivityMode) -> Result<bool> {
    if k == 0 {
        return Err(Error::validation("k must be at least 1"));
    }
    Ok(is_k_connected_adj(&g.adjacency(), k, mode))
}

/// Largest `k` for which the graph is k-connected (0 if none).
pub fn connectivity(g: &SimpleGraph, mode: ConnectivityMode) -> usize {
    let adj = g.adjacency();
    let mut k = 0;
    while is_k_connected_adj(&adj, k + 1, mode) {
        k += 1;
    }
    k
}

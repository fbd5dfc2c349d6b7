//! Graph and hypergraph value types.
//!
//! Vertices are dense `0..n` indices. Edge and hyperedge sets are kept in a
//! canonical sorted form, so structural equality is set equality and
//! serialization is deterministic.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected edge `(u, v)` with `u < v`.
pub type Edge = (usize, usize);

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl SimpleGraph {
    /// Builds a graph, rejecting self-loops and out-of-range endpoints.
    /// Duplicate edges (in either orientation) are collapsed.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::validation(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        Ok(Self::from_canonical(n, canon))
    }

    /// Edges must already be valid and oriented `u < v`; order and duplicates
    /// are fixed here.
    pub(crate) fn from_canonical(n: usize, mut edges: Vec<Edge>) -> Self {
        debug_assert!(edges.iter().all(|&(u, v)| u < v && v < n));
        edges.sort_unstable();
        edges.dedup();
        SimpleGraph { n, edges }
    }

    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        SimpleGraph { n, edges }
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`. Requires `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("a cycle needs at least 3 vertices, got {n}")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Self {
        Self::from_canonical(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    /// Clique on the given vertex set (unioned into an `n`-vertex graph).
    pub fn clique_on(n: usize, vertices: &[usize]) -> Result<Self> {
        let mut edges = Vec::with_capacity(vertices.len() * vertices.len().saturating_sub(1) / 2);
        for (a, &u) in vertices.iter().enumerate() {
            for &v in &vertices[a + 1..] {
                edges.push((u, v));
            }
        }
        Self::new(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical, sorted edge list.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.binary_search(&e).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let deg = self.degrees();
        let mut adj: Vec<Vec<usize>> = deg.iter().map(|&d| Vec::with_capacity(d)).collect();
        // Edges are sorted, so each list comes out sorted too.
        for &(u, v) in &self.edges {
            adj[u].push(v);
        }
        for &(u, v) in &self.edges {
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Edge-set union. Fails when vertex counts differ.
    pub fn union(&self, other: &SimpleGraph) -> Result<SimpleGraph> {
        self.check_same_n(other)?;
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.edges, &other.edges);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    edges.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    edges.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    edges.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        edges.extend_from_slice(&a[i..]);
        edges.extend_from_slice(&b[j..]);
        Ok(SimpleGraph { n: self.n, edges })
    }

    /// True iff every edge of `self` is an edge of `other` under the identity
    /// vertex map.
    pub fn is_subgraph_of(&self, other: &SimpleGraph) -> Result<bool> {
        self.check_same_n(other)?;
        let mut j = 0;
        for e in &self.edges {
            while j < other.edges.len() && other.edges[j] < *e {
                j += 1;
            }
            if j == other.edges.len() || other.edges[j] != *e {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_same_n(&self, other: &SimpleGraph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Edge-list text: `n m` header, then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edges.len() * 12);
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<SimpleGraph> {
        let mut lines = data_lines(text);
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing header".into(),
        })?;
        let header = parse_numbers(line_no, header)?;
        let [n, m] = header[..] else {
            return Err(Error::Parse {
                line: line_no,
                reason: "header must be `n m_edges`".into(),
            });
        };
        let mut edges = Vec::with_capacity(m);
        for (line_no, line) in lines {
            let nums = parse_numbers(line_no, line)?;
            let [u, v] = nums[..] else {
                return Err(Error::Parse {
                    line: line_no,
                    reason: "expected `u v`".into(),
                });
            };
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                reason: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        SimpleGraph::new(n, edges)
    }
}

/// `arity`-uniform hypergraph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UniformHypergraph {
    n: usize,
    arity: usize,
    hyperedges: Vec<Vec<usize>>,
}

impl UniformHypergraph {
    /// Each hyperedge must hold exactly `arity` distinct in-range vertices.
    /// Repeated hyperedges are collapsed.
    pub fn new(n: usize, arity: usize, hyperedges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        if arity < 2 {
            return Err(Error::validation(format!("arity must be at least 2, got {arity}")));
        }
        let mut canon = Vec::new();
        for mut h in hyperedges {
            h.sort_unstable();
            h.dedup();
            if h.len() != arity {
                return Err(Error::validation(format!(
                    "hyperedge {h:?} does not have {arity} distinct vertices"
                )));
            }
            if h[arity - 1] >= n {
                return Err(Error::validation(format!(
                    "hyperedge {h:?} has a vertex outside 0..{n}"
                )));
            }
            canon.push(h);
        }
        Ok(Self::from_sorted_sets(n, arity, canon))
    }

    /// Each inner vector must already be sorted, distinct and in range.
    pub(crate) fn from_sorted_sets(n: usize, arity: usize, mut hyperedges: Vec<Vec<usize>>) -> Self {
        hyperedges.sort_unstable();
        hyperedges.dedup();
        UniformHypergraph { n, arity, hyperedges }
    }

    pub fn empty(n: usize, arity: usize) -> Self {
        UniformHypergraph {
            n,
            arity,
            hyperedges: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn hyperedge_count(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn contains(&self, set: &[usize]) -> bool {
        let mut key = set.to_vec();
        key.sort_unstable();
        self.hyperedges.binary_search(&key).is_ok()
    }

    /// Clique projection: `{u, v}` is an edge iff some hyperedge holds both.
    pub fn project(&self) -> SimpleGraph {
        let per = self.arity * (self.arity - 1) / 2;
        let mut edges = Vec::with_capacity(self.hyperedges.len() * per);
        for h in &self.hyperedges {
            push_clique(&mut edges, h);
        }
        SimpleGraph::from_canonical(self.n, edges)
    }

    /// Header `n h_count arity`, then one sorted hyperedge per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.n, self.hyperedges.len(), self.arity);
        for h in &self.hyperedges {
            let line: Vec<String> = h.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<UniformHypergraph> {
        let mut lines = data_lines(text);
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing header".into(),
        })?;
        let header = parse_numbers(line_no, header)?;
        let [n, count, arity] = header[..] else {
            return Err(Error::Parse {
                line: line_no,
                reason: "header must be `n h_count arity`".into(),
            });
        };
        let mut hyperedges = Vec::with_capacity(count);
        for (line_no, line) in lines {
            let nums = parse_numbers(line_no, line)?;
            if nums.len() != arity {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("expected {arity} vertices"),
                });
            }
            hyperedges.push(nums);
        }
        if hyperedges.len() != count {
            return Err(Error::Parse {
                line: 1,
                reason: format!("header announces {count} hyperedges, found {}", hyperedges.len()),
            });
        }
        UniformHypergraph::new(n, arity, hyperedges)
    }
}

/// Random intersection graph instance: which vertices hold each feature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigInstance {
    n: usize,
    feature_sets: Vec<Vec<usize>>,
}

impl RigInstance {
    /// `feature_sets[i]` is `V_i`, the holders of feature `i`.
    pub fn new(n: usize, feature_sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut sets = feature_sets;
        for (i, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.last().is_some_and(|&v| v >= n) {
                return Err(Error::validation(format!(
                    "feature {i} holds a vertex outside 0..{n}"
                )));
            }
        }
        Ok(RigInstance {
            n,
            feature_sets: sets,
        })
    }

    pub(crate) fn from_sorted_sets(n: usize, feature_sets: Vec<Vec<usize>>) -> Self {
        debug_assert!(feature_sets
            .iter()
            .all(|s| s.windows(2).all(|w| w[0] < w[1]) && s.last().is_none_or(|&v| v < n)));
        RigInstance { n, feature_sets }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn feature_count(&self) -> usize {
        self.feature_sets.len()
    }

    pub fn feature_sets(&self) -> &[Vec<usize>] {
        &self.feature_sets
    }

    /// `W(v)` for every vertex: the sorted features each vertex holds.
    pub fn vertex_features(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (i, set) in self.feature_sets.iter().enumerate() {
            for &v in set {
                out[v].push(i);
            }
        }
        out
    }

    /// Intersection graph: union of cliques on the `V_i`.
    pub fn project(&self) -> SimpleGraph {
        let total: usize = self
            .feature_sets
            .iter()
            .map(|s| s.len() * s.len().saturating_sub(1) / 2)
            .sum();
        let mut edges = Vec::with_capacity(total);
        for set in &self.feature_sets {
            push_clique(&mut edges, set);
        }
        SimpleGraph::from_canonical(self.n, edges)
    }
}

/// Clique projection of a uniform hypergraph.
pub fn project_hypergraph(h: &UniformHypergraph) -> SimpleGraph {
    h.project()
}

/// Intersection graph of a RIG instance.
pub fn project_rig(r: &RigInstance) -> SimpleGraph {
    r.project()
}

pub fn union(a: &SimpleGraph, b: &SimpleGraph) -> Result<SimpleGraph> {
    a.union(b)
}

pub fn is_subgraph(a: &SimpleGraph, b: &SimpleGraph) -> Result<bool> {
    a.is_subgraph_of(b)
}

/// `set` must be sorted ascending.
pub(crate) fn push_clique(edges: &mut Vec<Edge>, set: &[usize]) {
    for (a, &u) in set.iter().enumerate() {
        for &v in &set[a + 1..] {
            edges.push((u, v));
        }
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                reason: format!("`{tok}`: {e}"),
            })
        })
        .collect()
}

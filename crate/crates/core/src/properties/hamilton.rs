//! Hamiltonicity: exact necessary conditions, a Pósa rotation-extension
//! search for certificates, then an exact search within an effort budget.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::connectivity::{cut_structure, is_connected_adj};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::seed::{tags, LabRng, Seed};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
const HELD_KARP_MAX_N: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonicityVerdict {
    pub verdict: Verdict,
    /// Vertex order of a Hamilton cycle when the verdict is `Yes`.
    pub certificate: Option<Vec<usize>>,
    /// Elementary search steps spent.
    pub effort: u64,
}

impl HamiltonicityVerdict {
    fn no(effort: u64) -> Self {
        HamiltonicityVerdict { verdict: Verdict::No, certificate: None, effort }
    }
}

/// Hamiltonicity with a fixed internal seed.
pub fn hamiltonicity(g: &SimpleGraph, budget: u64) -> Result<HamiltonicityVerdict> {
    hamiltonicity_seeded(g, budget, Seed::new(0).with_tag(tags::HAMILTON))
}

/// Hamiltonicity with an explicit seed for the randomized heuristic.
pub fn hamiltonicity_seeded(g: &SimpleGraph, budget: u64, seed: Seed) -> Result<HamiltonicityVerdict> {
    let n = g.vertex_count();
    if n < 3 {
        return Err(Error::Domain(format!("Hamiltonicity needs at least 3 vertices, got {n}")));
    }
    let adj = g.adjacency();
    Ok(decide(&adj, budget, &mut seed.rng()))
}

pub(crate) fn decide(adj: &[Vec<usize>], budget: u64, rng: &mut LabRng) -> HamiltonicityVerdict {
    let n = adj.len();
    if adj.iter().any(|l| l.len() < 2) || !is_connected_adj(adj) || cut_structure(adj).0 {
        return HamiltonicityVerdict::no(0);
    }
    if bipartite_imbalanced(adj) {
        return HamiltonicityVerdict::no(0);
    }
    let heuristic_budget = if n <= HELD_KARP_MAX_N { budget.min(4_000) } else { budget / 2 };
    let mut effort = 0u64;
    if let Some(cycle) = posa(adj, heuristic_budget, &mut effort, rng) {
        debug_assert!(is_hamilton_cycle(adj, &cycle));
        return HamiltonicityVerdict { verdict: Verdict::Yes, certificate: Some(cycle), effort };
    }
    let found = if n <= HELD_KARP_MAX_N {
        Some(held_karp(adj, &mut effort))
    } else {
        backtrack(adj, budget.saturating_sub(effort).max(1), &mut effort)
    };
    match found {
        Some(Some(cycle)) => {
            debug_assert!(is_hamilton_cycle(adj, &cycle));
            HamiltonicityVerdict { verdict: Verdict::Yes, certificate: Some(cycle), effort }
        }
        Some(None) => HamiltonicityVerdict::no(effort),
        None => HamiltonicityVerdict { verdict: Verdict::Unknown, certificate: None, effort },
    }
}

fn adjacent(adj: &[Vec<usize>], u: usize, v: usize) -> bool {
    adj[u].binary_search(&v).is_ok()
}

pub(crate) fn is_hamilton_cycle(adj: &[Vec<usize>], cycle: &[usize]) -> bool {
    let n = adj.len();
    if cycle.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in cycle {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..n).all(|i| adjacent(adj, cycle[i], cycle[(i + 1) % n]))
}

/// A connected bipartite graph with unequal sides has no Hamilton cycle.
fn bipartite_imbalanced(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut side = vec![u8::MAX; n];
    side[0] = 0;
    let mut stack = vec![0];
    let mut counts = [1usize, 0];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if side[w] == u8::MAX {
                side[w] = 1 - side[v];
                counts[side[w] as usize] += 1;
                stack.push(w);
            } else if side[w] == side[v] {
                return false;
            }
        }
    }
    counts[0] != counts[1]
}

/// Randomized rotation-extension. Returns a verified cycle or gives up.
fn posa(adj: &[Vec<usize>], budget: u64, effort: &mut u64, rng: &mut LabRng) -> Option<Vec<usize>> {
    let n = adj.len();
    let restarts = 20 * n;
    let rotation_cap = (n as u64).saturating_mul(n as u64);
    let mut pos = vec![usize::MAX; n];
    let mut free = vec![0usize; n];
    let mut path: Vec<usize> = Vec::with_capacity(n);
    let min_deg_vertex = (0..n).min_by_key(|&v| adj[v].len()).unwrap_or(0);
    for restart in 0..restarts {
        if *effort >= budget {
            return None;
        }
        path.clear();
        pos.iter_mut().for_each(|p| *p = usize::MAX);
        for v in 0..n {
            free[v] = adj[v].len();
        }
        let start = if restart == 0 { min_deg_vertex } else { rng.random_range(0..n) };
        let visit = |v: usize, path: &mut Vec<usize>, pos: &mut Vec<usize>, free: &mut Vec<usize>| {
            pos[v] = path.len();
            path.push(v);
            for &w in &adj[v] {
                free[w] -= 1;
            }
        };
        visit(start, &mut path, &mut pos, &mut free);
        let mut rotations = 0u64;
        loop {
            *effort += 1;
            if *effort >= budget || rotations > rotation_cap {
                break;
            }
            let end = *path.last().expect("non-empty path");
            if path.len() == n && adjacent(adj, end, path[0]) {
                return Some(path.clone());
            }
            // Extend toward the unvisited neighbour with fewest options.
            let mut best: Option<usize> = None;
            let mut ties = 0u32;
            for &w in &adj[end] {
                if pos[w] != usize::MAX {
                    continue;
                }
                match best {
                    Some(b) if free[w] > free[b] => {}
                    Some(b) if free[w] == free[b] => {
                        ties += 1;
                        if rng.random_range(0..=ties) == 0 {
                            best = Some(w);
                        }
                    }
                    _ => {
                        best = Some(w);
                        ties = 0;
                    }
                }
            }
            if let Some(w) = best {
                visit(w, &mut path, &mut pos, &mut free);
                continue;
            }
            // Flip the path if the other end can still extend.
            let head = path[0];
            if path.len() < n && adj[head].iter().any(|&w| pos[w] == usize::MAX) {
                path.reverse();
                for (i, &v) in path.iter().enumerate() {
                    pos[v] = i;
                }
                *effort += path.len() as u64;
                rotations += 1;
                continue;
            }
            // Rotate: pick a path neighbour of the endpoint, not its predecessor.
            let len = path.len();
            let pred = if len >= 2 { path[len - 2] } else { usize::MAX };
            let choices: Vec<usize> = adj[end].iter().copied().filter(|&u| u != pred && pos[u] != usize::MAX).collect();
            let Some(&u) = choices.choose(rng) else { break };
            let i = pos[u];
            path[i + 1..].reverse();
            for (j, &v) in path.iter().enumerate().skip(i + 1) {
                pos[v] = j;
            }
            *effort += (len - i) as u64;
            rotations += 1;
        }
    }
    None
}

/// Exact bitmask dynamic programme for small `n`. Always decides.
fn held_karp(adj: &[Vec<usize>], effort: &mut u64) -> Option<Vec<usize>> {
    let n = adj.len();
    let bit = |v: usize| 1u32 << (v - 1);
    let full: u32 = if n == 1 { 0 } else { (1u32 << (n - 1)) - 1 };
    let mut ends = vec![0u32; full as usize + 1];
    for &v in &adj[0] {
        ends[bit(v) as usize] |= bit(v);
    }
    for mask in 1..=full {
        let mut set = ends[mask as usize];
        while set != 0 {
            let v = set.trailing_zeros() as usize + 1;
            set &= set - 1;
            for &u in &adj[v] {
                *effort += 1;
                if u != 0 && mask & bit(u) == 0 {
                    ends[(mask | bit(u)) as usize] |= bit(u);
                }
            }
        }
    }
    let mut last = None;
    for &v in &adj[0] {
        if ends[full as usize] & bit(v) != 0 {
            last = Some(v);
            break;
        }
    }
    let mut cur = last?;
    let mut mask = full;
    let mut rev = vec![cur];
    while mask.count_ones() > 1 {
        let prev_mask = mask ^ bit(cur);
        let prev = adj[cur]
            .iter()
            .copied()
            .find(|&w| w != 0 && ends[prev_mask as usize] & bit(w) != 0)
            .expect("dp reconstruction");
        rev.push(prev);
        mask = prev_mask;
        cur = prev;
    }
    rev.push(0);
    rev.reverse();
    Some(rev)
}

/// Depth-first search with degree pruning. `None` when the budget runs out,
/// `Some(None)` when no cycle exists.
fn backtrack(adj: &[Vec<usize>], budget: u64, effort: &mut u64) -> Option<Option<Vec<usize>>> {
    let mut s = Search::new(adj);
    let spent_before = *effort;
    let mut frames: Vec<(Vec<usize>, usize)> = vec![(s.candidates(s.start), 0)];
    while let Some((cands, idx)) = frames.last_mut() {
        if *idx == cands.len() {
            frames.pop();
            if !frames.is_empty() {
                s.pop();
            }
            continue;
        }
        let v = cands[*idx];
        *idx += 1;
        *effort += 1;
        if *effort - spent_before > budget {
            return None;
        }
        if !s.push(v) {
            s.pop();
            continue;
        }
        if s.path.len() == adj.len() {
            if adjacent(adj, v, s.start) {
                return Some(Some(s.path));
            }
            s.pop();
            continue;
        }
        frames.push((s.candidates(v), 0));
    }
    Some(None)
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    start: usize,
    path: Vec<usize>,
    visited: Vec<bool>,
    /// Neighbours that are not interior path vertices.
    free: Vec<usize>,
    /// Unvisited neighbours of the start vertex.
    start_open: usize,
}

impl<'a> Search<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        let start = (0..n).min_by_key(|&v| adj[v].len()).expect("n >= 3");
        let mut visited = vec![false; n];
        visited[start] = true;
        Search {
            adj,
            start,
            path: vec![start],
            visited,
            free: adj.iter().map(Vec::len).collect(),
            start_open: adj[start].len(),
        }
    }

    fn candidates(&self, end: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.adj[end].iter().copied().filter(|&w| !self.visited[w]).collect();
        c.sort_by_key(|&w| self.free[w]);
        c
    }

    /// Appends `v`; returns false if the extended path cannot close.
    fn push(&mut self, v: usize) -> bool {
        let end = *self.path.last().expect("non-empty path");
        if end != self.start {
            for &w in &self.adj[end] {
                self.free[w] -= 1;
            }
        }
        self.visited[v] = true;
        if adjacent(self.adj, self.start, v) {
            self.start_open -= 1;
        }
        self.path.push(v);
        if self.path.len() == self.adj.len() {
            return true;
        }
        let stranded = self.adj[end].iter().any(|&w| !self.visited[w] && self.free[w] < 2);
        !stranded && (self.start_open > 0 || adjacent(self.adj, v, self.start))
    }

    fn pop(&mut self) {
        let v = self.path.pop().expect("non-empty path");
        self.visited[v] = false;
        if adjacent(self.adj, self.start, v) {
            self.start_open += 1;
        }
        let end = *self.path.last().expect("start stays on path");
        if end != self.start {
            for &w in &self.adj[end] {
                self.free[w] += 1;
            }
        }
    }
}

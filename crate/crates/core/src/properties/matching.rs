//! Maximum matching in general graphs (Edmonds' blossom algorithm).

use std::collections::VecDeque;

use crate::graph::SimpleGraph;

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    lca_mark: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        let mut mate = vec![NONE; n];
        // Greedy start: lowest-degree vertices first.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| adj[v].len());
        for &v in &order {
            if mate[v] == NONE {
                if let Some(&w) = adj[v].iter().find(|&&w| mate[w] == NONE) {
                    mate[v] = w;
                    mate[w] = v;
                }
            }
        }
        Blossom {
            adj,
            mate,
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            lca_mark: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.lca_mark.iter_mut().for_each(|m| *m = false);
        loop {
            a = self.base[a];
            self.lca_mark[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.lca_mark[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Endpoint of an augmenting path from `root`, if one exists.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|m| *m = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut u: usize) {
        while u != NONE {
            let pv = self.parent[u];
            let ppv = self.mate[pv];
            self.mate[u] = pv;
            self.mate[pv] = u;
            u = ppv;
        }
    }

    /// Runs to completion, or stops at the first vertex that can never be
    /// matched when `stop_on_exposed` is set.
    fn run(&mut self, stop_on_exposed: bool) -> bool {
        for v in 0..self.adj.len() {
            if self.mate[v] != NONE {
                continue;
            }
            match self.find_path(v) {
                Some(end) => self.augment(end),
                // A vertex with no augmenting path stays exposed forever.
                None if stop_on_exposed => return false,
                None => {}
            }
        }
        true
    }
}

/// Maximum matching as a mate array.
pub fn maximum_matching(g: &SimpleGraph) -> Vec<Option<usize>> {
    let adj = g.adjacency();
    let mut b = Blossom::new(&adj);
    b.run(false);
    b.mate.into_iter().map(|m| (m != NONE).then_some(m)).collect()
}

pub(crate) fn has_perfect_matching_adj(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    if n % 2 == 1 || adj.iter().any(Vec::is_empty) {
        return false;
    }
    Blossom::new(adj).run(true)
}

/// True iff the graph has a matching covering every vertex.
pub fn has_perfect_matching(g: &SimpleGraph) -> bool {
    has_perfect_matching_adj(&g.adjacency())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::testing::{brute_matching_number, petersen, random_graph};

    fn check_valid(g: &SimpleGraph, mate: &[Option<usize>]) -> usize {
        let mut size = 0;
        for (v, m) in mate.iter().enumerate() {
            if let Some(w) = *m {
                assert_eq!(mate[w], Some(v));
                assert!(g.has_edge(v, w));
                size += 1;
            }
        }
        size / 2
    }

    #[test]
    fn named_examples() {
        assert!(has_perfect_matching(&SimpleGraph::cycle(6).unwrap()));
        assert!(!has_perfect_matching(&SimpleGraph::cycle(5).unwrap()));
        assert!(has_perfect_matching(&petersen()));
        let star = SimpleGraph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!has_perfect_matching(&star));
        // Two triangles joined by an edge.
        let g = SimpleGraph::new(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(has_perfect_matching(&g));
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        for t in 0..400 {
            let n = 2 + (t as usize % 7);
            let g = random_graph(n, 0.45, 20_000 + t);
            let mate = maximum_matching(&g);
            let size = check_valid(&g, &mate);
            let best = brute_matching_number(&g);
            assert_eq!(size, best, "trial {t}");
            assert_eq!(has_perfect_matching(&g), 2 * best == n, "trial {t}");
        }
    }

    #[test]
    fn blossom_heavy_graphs() {
        // Odd cycles sharing vertices force repeated contractions.
        for t in 0..100 {
            let g = random_graph(40, 0.08, 70_000 + t);
            let mate = maximum_matching(&g);
            let size = check_valid(&g, &mate);
            // Berge: maximum iff no augmenting path from any exposed vertex.
            let adj = g.adjacency();
            let mut b = Blossom::new(&adj);
            b.mate = mate.iter().map(|m| m.unwrap_or(NONE)).collect();
            for v in 0..40 {
                if b.mate[v] == NONE {
                    assert!(b.find_path(v).is_none(), "trial {t}: augmenting path remains");
                }
            }
            assert!(size <= 20);
        }
    }
}

//! Monotone graph properties and structural audits.

pub mod audit;
pub mod connectivity;
pub mod hamilton;
pub mod matching;

pub use audit::{structure_audit, AuditParams, AuditReport};
pub use connectivity::{connectivity, is_connected, is_k_connected, ConnectivityMode};
pub use hamilton::{hamiltonicity, hamiltonicity_seeded, HamiltonicityVerdict, Verdict};
pub use matching::{has_perfect_matching, maximum_matching};

use crate::graph::SimpleGraph;

/// Minimum degree (0 for the empty vertex set).
pub fn min_degree(g: &SimpleGraph) -> usize {
    g.degrees().into_iter().min().unwrap_or(0)
}

#[cfg(test)]
pub(crate) mod testing {
    //! Small fixtures and exhaustive reference checkers.

    use rand::Rng;

    use crate::graph::SimpleGraph;
    use crate::seed::Seed;

    pub fn petersen() -> SimpleGraph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        SimpleGraph::new(10, edges).unwrap()
    }

    pub fn random_graph(n: usize, p: f64, trial: u64) -> SimpleGraph {
        let mut rng = Seed::new(0xC0FFEE).with_trial(trial).rng();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        SimpleGraph::new(n, edges).unwrap()
    }

    fn connected_without(g: &SimpleGraph, removed: u32) -> bool {
        let n = g.vertex_count();
        let adj = g.adjacency();
        let Some(root) = (0..n).find(|&v| removed & (1 << v) == 0) else { return true };
        let mut seen = removed | (1 << root);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if seen & (1 << w) == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        seen.count_ones() as usize == n
    }

    /// Vertex connectivity by removing every vertex subset.
    pub fn brute_vertex_connectivity(g: &SimpleGraph) -> usize {
        let n = g.vertex_count();
        let mut best = n.saturating_sub(1);
        for removed in 0u32..(1 << n) {
            let r = removed.count_ones() as usize;
            if r < best && n - r >= 2 && !connected_without(g, removed) {
                best = r;
            }
        }
        best
    }

    pub fn brute_matching_number(g: &SimpleGraph) -> usize {
        fn go(edges: &[(usize, usize)], used: u32) -> usize {
            match edges.split_first() {
                None => 0,
                Some((&(u, v), rest)) => {
                    let skip = go(rest, used);
                    if used & (1 << u) == 0 && used & (1 << v) == 0 {
                        skip.max(1 + go(rest, used | 1 << u | 1 << v))
                    } else {
                        skip
                    }
                }
            }
        }
        go(g.edges(), 0)
    }

    /// Tries every cyclic order starting at vertex 0.
    pub fn brute_hamiltonian(g: &SimpleGraph) -> bool {
        fn go(g: &SimpleGraph, path: &mut Vec<usize>, used: u32) -> bool {
            let n = g.vertex_count();
            let end = *path.last().unwrap();
            if path.len() == n {
                return g.has_edge(end, path[0]);
            }
            for v in 0..n {
                if used & (1 << v) == 0 && g.has_edge(end, v) {
                    path.push(v);
                    if go(g, path, used | 1 << v) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        g.vertex_count() >= 3 && go(g, &mut vec![0], 1)
    }

    #[test]
    fn brute_force_references_on_fixtures() {
        let p = petersen();
        assert_eq!(brute_vertex_connectivity(&p), 3);
        assert_eq!(brute_matching_number(&p), 5);
        assert!(!brute_hamiltonian(&p));
        assert!(brute_hamiltonian(&SimpleGraph::complete(6)));
        assert_eq!(brute_vertex_connectivity(&SimpleGraph::complete(6)), 5);
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;

    #[test]
    fn min_degree_examples() {
        assert_eq!(min_degree(&SimpleGraph::complete(4)), 3);
        assert_eq!(min_degree(&SimpleGraph::path(4)), 1);
        assert_eq!(min_degree(&SimpleGraph::empty(0)), 0);
        assert_eq!(min_degree(&petersen()), 3);
    }

    #[test]
    fn vertex_connectivity_matches_exhaustive_removal() {
        for t in 0..500 {
            let n = 2 + (t as usize % 7);
            let g = random_graph(n, 0.6, 90_000 + t);
            let brute = if n >= 2 && (0..n).all(|v| (0..n).all(|w| v == w || g.has_edge(v, w))) {
                n - 1
            } else {
                brute_vertex_connectivity(&g)
            };
            assert_eq!(connectivity(&g, ConnectivityMode::Vertex), brute, "trial {t}");
        }
    }
}

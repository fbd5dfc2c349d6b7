//! Sampled neighbourhood-expansion checks and an exact low-degree spacing
//! check.
//!
//! Each expansion check draws random vertex sets from geometric size
//! classes and counts those whose external neighbourhood is too small.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::seed::{tags, LabRng, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditParams {
    /// Lower size exponent: sets have at least `n^gamma` vertices.
    pub gamma: f64,
    pub k: usize,
    /// Degree cutoff for the low-degree spacing check.
    pub low_degree: usize,
    /// Random sets drawn per size class.
    pub samples_per_class: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledCheck {
    pub size_classes: Vec<usize>,
    pub sets_checked: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpacingCheck {
    pub low_degree_vertices: usize,
    /// Pairs of low-degree vertices at distance at most 5.
    pub violating_pairs: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Sets of size in `[n^gamma, n/4]` with `|N(S)| <= 2|S|`.
    pub small_set_expansion: SampledCheck,
    /// Sets of size in `[n^gamma, 2n/3]` with
    /// `|N(S)| <= min(|S|, 4n ln ln n / ln n)`.
    pub large_set_expansion: SampledCheck,
    /// Sets of high-degree vertices (degree at least `4k + 15`) of size at
    /// most `n^gamma` with `|N(S)| < 2k|S|`.
    pub high_degree_expansion: SampledCheck,
    pub eligible_high_degree: usize,
    pub low_degree_spacing: SpacingCheck,
}

impl AuditReport {
    pub fn total_violations(&self) -> usize {
        self.small_set_expansion.violations
            + self.large_set_expansion.violations
            + self.high_degree_expansion.violations
            + self.low_degree_spacing.violating_pairs
    }
}

/// Geometric size classes from `lo` to `hi` inclusive (doubling).
fn size_classes(lo: usize, hi: usize) -> Vec<usize> {
    let lo = lo.max(1);
    let mut out = Vec::new();
    let mut s = lo;
    while s <= hi {
        out.push(s);
        s *= 2;
    }
    if lo <= hi && out.last() != Some(&hi) {
        out.push(hi);
    }
    out
}

/// `|N(S) \ S|` with a reusable stamp array.
fn external_neighbourhood(adj: &[Vec<usize>], set: &[usize], stamp: &mut [u32], epoch: u32) -> usize {
    for &v in set {
        stamp[v] = epoch;
    }
    let mut count = 0;
    for &v in set {
        for &w in &adj[v] {
            if stamp[w] != epoch && stamp[w] != epoch.wrapping_add(1) {
                stamp[w] = epoch.wrapping_add(1);
                count += 1;
            }
        }
    }
    count
}

struct Sampler<'a> {
    adj: &'a [Vec<usize>],
    stamp: Vec<u32>,
    epoch: u32,
}

impl Sampler<'_> {
    fn run(
        &mut self,
        rng: &mut LabRng,
        pool: &[usize],
        classes: &[usize],
        samples: usize,
        violates: impl Fn(usize, usize) -> bool,
    ) -> SampledCheck {
        let mut check = SampledCheck { size_classes: classes.to_vec(), ..Default::default() };
        let mut set = Vec::new();
        for &size in classes {
            for _ in 0..samples {
                set.clear();
                set.extend(sample(rng, pool.len(), size).into_iter().map(|i| pool[i]));
                self.epoch = self.epoch.wrapping_add(2);
                if self.epoch < 2 {
                    self.stamp.iter_mut().for_each(|s| *s = 0);
                    self.epoch = 2;
                }
                let nb = external_neighbourhood(self.adj, &set, &mut self.stamp, self.epoch);
                check.sets_checked += 1;
                if violates(size, nb) {
                    check.violations += 1;
                }
            }
        }
        check
    }
}

/// Runs all four checks. Sampling is deterministic given `seed`.
pub fn structure_audit(g: &SimpleGraph, params: &AuditParams, seed: Seed) -> Result<AuditReport> {
    if !(params.gamma > 0.0 && params.gamma < 1.0) {
        return Err(Error::validation(format!("gamma must lie in (0, 1), got {}", params.gamma)));
    }
    if params.k == 0 {
        return Err(Error::validation("k must be at least 1"));
    }
    let n = g.vertex_count();
    if n < 3 {
        return Err(Error::Domain(format!("audit needs at least 3 vertices, got {n}")));
    }
    let adj = g.adjacency();
    let nf = n as f64;
    let lo = nf.powf(params.gamma).ceil() as usize;
    let mut rng = seed.with_tag(tags::AUDIT).rng();
    let mut sampler = Sampler { adj: &adj, stamp: vec![0; n], epoch: 0 };
    let everyone: Vec<usize> = (0..n).collect();

    let small = sampler.run(&mut rng, &everyone, &size_classes(lo, n / 4), params.samples_per_class, |s, nb| {
        nb <= 2 * s
    });
    let cap = if nf.ln().ln() > 0.0 { 4.0 * nf * nf.ln().ln() / nf.ln() } else { 0.0 };
    let large = sampler.run(&mut rng, &everyone, &size_classes(lo, 2 * n / 3), params.samples_per_class, |s, nb| {
        nb as f64 <= (s as f64).min(cap)
    });
    let high: Vec<usize> = (0..n).filter(|&v| adj[v].len() >= 4 * params.k + 15).collect();
    let high_hi = nf.powf(params.gamma).floor() as usize;
    let k = params.k;
    let high_check = sampler.run(
        &mut rng,
        &high,
        &size_classes(1, high_hi.min(high.len())),
        params.samples_per_class,
        |s, nb| nb < 2 * k * s,
    );
    Ok(AuditReport {
        small_set_expansion: small,
        large_set_expansion: large,
        high_degree_expansion: high_check,
        eligible_high_degree: high.len(),
        low_degree_spacing: low_degree_spacing(&adj, params.low_degree),
    })
}

/// Exact: BFS to depth 5 from every vertex of degree at most `cutoff`.
fn low_degree_spacing(adj: &[Vec<usize>], cutoff: usize) -> SpacingCheck {
    let n = adj.len();
    let low: Vec<usize> = (0..n).filter(|&v| adj[v].len() <= cutoff).collect();
    let mut is_low = vec![false; n];
    for &v in &low {
        is_low[v] = true;
    }
    let mut dist = vec![u8::MAX; n];
    let mut touched = Vec::new();
    let mut violating = 0;
    for &src in &low {
        touched.clear();
        dist[src] = 0;
        touched.push(src);
        let mut head = 0;
        while head < touched.len() {
            let v = touched[head];
            head += 1;
            if dist[v] == 5 {
                continue;
            }
            for &w in &adj[v] {
                if dist[w] == u8::MAX {
                    dist[w] = dist[v] + 1;
                    touched.push(w);
                    if is_low[w] && w > src {
                        violating += 1;
                    }
                }
            }
        }
        for &v in &touched {
            dist[v] = u8::MAX;
        }
    }
    SpacingCheck { low_degree_vertices: low.len(), violating_pairs: violating }
}

//! Executable couplings: per-feature clique coupling with draw-count
//! models, the coupon-collector coupling for minimum degree, and a paired
//! test of the Poissonized draw identity.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::combin::binomial_u64;
use crate::error::{Error, Result};
use crate::generators::{
    poissonized_edge_probability, sample_g_star_poisson, sample_h_independent, sample_rig_with, DrawStream,
    FeatureProbabilities,
};
use crate::graph::{push_clique, RigInstance, SimpleGraph, UniformHypergraph};
use crate::poisson::sample_poisson;
use crate::seed::{tags, LabRng, Seed};
use crate::threshold::{summary_stats, ThresholdStats, DEFAULT_T_MAX};

/// Per-feature sizes and their even/odd split.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDecomposition {
    /// `|V_i|`.
    pub x: Vec<usize>,
    /// `X_i` if `X_i >= 2`, else 0.
    pub y: Vec<usize>,
    /// 1 iff `Y_i` is odd.
    pub z: Vec<u8>,
    /// `Σ (Y_i - 3 Z_i) / 2`.
    pub m2: u64,
    /// `Σ Z_i`.
    pub m3: u64,
}

impl FeatureDecomposition {
    pub fn from_sizes(x: Vec<usize>) -> Self {
        let y: Vec<usize> = x.iter().map(|&s| if s >= 2 { s } else { 0 }).collect();
        let z: Vec<u8> = y.iter().map(|&s| (s % 2) as u8).collect();
        let mut m2 = 0u64;
        for (&yi, &zi) in y.iter().zip(&z) {
            let even = yi - 3 * zi as usize;
            assert!(even.is_multiple_of(2), "Y_i - 3 Z_i must be even");
            m2 += (even / 2) as u64;
        }
        let m3 = z.iter().map(|&zi| u64::from(zi)).sum();
        FeatureDecomposition { x, y, z, m2, m3 }
    }

    pub fn sum_y(&self) -> u64 {
        self.y.iter().map(|&v| v as u64).sum()
    }
}

pub fn decompose_features(r: &RigInstance) -> FeatureDecomposition {
    FeatureDecomposition::from_sizes(r.feature_sets().iter().map(Vec::len).collect())
}

fn check_feature_request(y: usize, z: u8, n: usize) -> Result<()> {
    if y == 1 || y > n {
        return Err(Error::validation(format!("feature size {y} must be 0 or in 2..={n}")));
    }
    if z > 1 || usize::from(z) != y % 2 {
        return Err(Error::validation(format!("parity flag {z} does not match size {y}")));
    }
    Ok(())
}

/// Draw streams shared by all features of one coupled instance.
struct FeatureCoupler {
    n: usize,
    pairs: DrawStream,
    triples: Option<DrawStream>,
    padding: LabRng,
}

impl FeatureCoupler {
    fn new(n: usize, seed: Seed) -> Result<Self> {
        Ok(FeatureCoupler {
            n,
            pairs: DrawStream::new(n, 2, seed.with_tag(tags::DRAWS_ARITY2))?,
            triples: if n >= 3 { Some(DrawStream::new(n, 3, seed.with_tag(tags::DRAWS_ARITY3))?) } else { None },
            padding: seed.with_tag(tags::PADDING).rng(),
        })
    }

    /// Appends the feature's drawn edges to `edges` and returns its padded
    /// vertex set (sorted).
    fn couple(&mut self, y: usize, z: u8, edges: &mut Vec<(usize, usize)>) -> Vec<usize> {
        if y == 0 {
            return Vec::new();
        }
        let mut touched: HashSet<usize> = HashSet::with_capacity(y);
        for _ in 0..(y - 3 * usize::from(z)) / 2 {
            let s = self.pairs.next_set();
            push_clique(edges, &s);
            touched.extend(s);
        }
        if z == 1 {
            let s = self.triples.as_mut().expect("odd size implies n >= 3").next_set();
            push_clique(edges, &s);
            touched.extend(s);
        }
        let missing = y - touched.len();
        if missing > 0 {
            if 2 * y <= self.n {
                while touched.len() < y {
                    touched.insert(self.padding.random_range(0..self.n));
                }
            } else {
                let rest: Vec<usize> = (0..self.n).filter(|v| !touched.contains(v)).collect();
                let picks = sample(&mut self.padding, rest.len(), missing);
                touched.extend(picks.into_iter().map(|i| rest[i]));
            }
        }
        let mut set: Vec<usize> = touched.into_iter().collect();
        set.sort_unstable();
        set
    }
}

/// `G*_2(n, (y-3z)/2) ∪ G*_3(n, z)` with its vertex set padded uniformly
/// to exactly `y` vertices. The graph always lies inside the clique on the
/// returned set.
pub fn couple_feature(y: usize, z: u8, n: usize, seed: Seed) -> Result<(SimpleGraph, Vec<usize>)> {
    check_feature_request(y, z, n)?;
    if y == 0 {
        return Ok((SimpleGraph::empty(n), Vec::new()));
    }
    let mut coupler = FeatureCoupler::new(n, seed)?;
    let mut edges = Vec::new();
    let set = coupler.couple(y, z, &mut edges);
    Ok((SimpleGraph::from_canonical(n, edges), set))
}

/// A coupled instance: the RIG built from padded feature sets, together
/// with the union of the per-feature draw graphs it contains.
#[derive(Clone, Debug)]
pub struct CoupledInstance {
    pub decomposition: FeatureDecomposition,
    pub rig: RigInstance,
    pub draw_union: SimpleGraph,
}

/// Samples feature sizes from `G(n, m, p̄)` and rebuilds every feature by
/// the clique coupling, consuming the shared draw streams in feature order.
pub fn coupled_instance(n: usize, p: &FeatureProbabilities, seed: Seed) -> Result<CoupledInstance> {
    if n < 2 {
        return Err(Error::validation("coupling needs at least 2 vertices"));
    }
    let original = sample_rig_with(n, p, &mut seed.with_tag(tags::FEATURES).rng());
    let decomposition = decompose_features(&original);
    let mut coupler = FeatureCoupler::new(n, seed)?;
    let mut edges = Vec::new();
    let sets: Vec<Vec<usize>> =
        decomposition.y.iter().zip(&decomposition.z).map(|(&y, &z)| coupler.couple(y, z, &mut edges)).collect();
    debug_assert_eq!(coupler.pairs.drawn(), decomposition.m2);
    Ok(CoupledInstance {
        rig: RigInstance::from_sorted_sets(n, sets),
        draw_union: SimpleGraph::from_canonical(n, edges),
        decomposition,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardEvents {
    /// `m2' <= M2`, with a positive Poisson mean.
    pub poisson_m2_ok: bool,
    /// `m3' <= M3`, with a positive Poisson mean.
    pub poisson_m3_ok: bool,
    /// `|ΣY - S1| <= ω √S1`.
    pub y_concentration_ok: bool,
}

impl GuardEvents {
    pub fn all(&self) -> bool {
        self.poisson_m2_ok && self.poisson_m3_ok && self.y_concentration_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub n: usize,
    pub m: usize,
    pub omega: f64,
    pub s1: f64,
    pub s3: f64,
    pub m2: u64,
    pub m3: u64,
    pub sum_y: u64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub m2_prime: u64,
    pub m3_prime: u64,
    pub guard_events: GuardEvents,
    /// Per-feature draw union inside the coupled RIG.
    pub per_feature_contained: bool,
    /// `G*_2(n, m2') ∪ G*_3(n, m3')` inside the coupled RIG.
    pub contained: bool,
    pub prefix_edge_count: usize,
    pub rig_edge_count: usize,
    /// `ω² >= S3 / √S1`: no admissible `ω'` at this size.
    pub regime_infeasible: bool,
}

fn coupling_stats(n: usize, p: &FeatureProbabilities) -> Result<ThresholdStats> {
    let stats = summary_stats(n, p, DEFAULT_T_MAX.min(n))?;
    if stats.s1.is_nan() || stats.s1 <= 0.0 {
        return Err(Error::validation("S1 is zero; nothing to couple"));
    }
    Ok(stats)
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("omega must be positive, got {omega}")))
    }
}

/// One pass of the full chain: feature sizes, per-feature coupling,
/// Poissonized draw counts, and prefix containment.
pub fn run_coupling_trial(n: usize, p: &FeatureProbabilities, omega: f64, seed: Seed) -> Result<CouplingReport> {
    check_omega(omega)?;
    let stats = coupling_stats(n, p)?;
    let inst = coupled_instance(n, p, seed)?;
    let rig_graph = inst.rig.project();
    let per_feature_contained = inst.draw_union.is_subgraph_of(&rig_graph)?;

    let root = omega * stats.s1.sqrt();
    let raw2 = (stats.s1 - 3.0 * stats.s3 - 5.0 * root) / 2.0;
    let raw3 = stats.s3 - 2.0 * root;
    let (lambda2, lambda3) = (raw2.max(0.0), raw3.max(0.0));
    let mut counts = seed.with_tag(tags::POISSON_COUNTS).rng();
    let m2_prime = sample_poisson(&mut counts, lambda2);
    let m3_prime = sample_poisson(&mut counts, lambda3);
    let d = &inst.decomposition;
    let sum_y = d.sum_y();
    let guard_events = GuardEvents {
        poisson_m2_ok: raw2 > 0.0 && m2_prime <= d.m2,
        poisson_m3_ok: raw3 > 0.0 && m3_prime <= d.m3,
        y_concentration_ok: (sum_y as f64 - stats.s1).abs() <= root,
    };

    // Replay the same streams from the start: the first m' draws.
    let mut edges = Vec::new();
    let mut pairs = DrawStream::new(n, 2, seed.with_tag(tags::DRAWS_ARITY2))?;
    for _ in 0..m2_prime {
        push_clique(&mut edges, &pairs.next_set());
    }
    if m3_prime > 0 {
        let mut triples = DrawStream::new(n, 3, seed.with_tag(tags::DRAWS_ARITY3))?;
        for _ in 0..m3_prime {
            push_clique(&mut edges, &triples.next_set());
        }
    }
    let prefix = SimpleGraph::from_canonical(n, edges);
    let contained = prefix.is_subgraph_of(&rig_graph)?;

    Ok(CouplingReport {
        n,
        m: p.len(),
        omega,
        s1: stats.s1,
        s3: stats.s3,
        m2: d.m2,
        m3: d.m3,
        sum_y,
        lambda2,
        lambda3,
        m2_prime,
        m3_prime,
        guard_events,
        per_feature_contained,
        contained,
        prefix_edge_count: prefix.edge_count(),
        rig_edge_count: rig_graph.edge_count(),
        regime_infeasible: omega * omega >= stats.s3 / stats.s1.sqrt(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectorEvents {
    /// All coupons collected within `T-` draws.
    pub a_minus: bool,
    /// All coupons collected within `T+` draws.
    pub a_plus: bool,
    /// `T <= ΣY + S1 / (ω ln n)`.
    pub b1: bool,
    /// `|ΣY - S1| <= ω √S1`.
    pub b2: bool,
    /// `T- <= T <= T+`.
    pub b: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollectorReport {
    pub n: usize,
    pub m: usize,
    pub omega: f64,
    pub s1: f64,
    pub t_minus: f64,
    pub t_plus: f64,
    /// `T = Σ T_i`.
    pub total_draws: u64,
    pub sum_y: u64,
    /// `Σ (T_i - Y_i)`.
    pub overhead: u64,
    /// Draw index at which the last coupon first appeared.
    pub covered_at: u64,
    pub events: CollectorEvents,
    pub delta_ge_1: bool,
    /// `(A- ∧ B) ⇒ δ >= 1 ⇒ (A+ ∨ ¬B)` on this trial.
    pub sandwich_holds: bool,
}

/// Feature phases driven by a coupon-collector process. Phase `i` draws
/// uniform vertices until it has seen `y_i` distinct ones.
pub fn coupon_collector_trial(n: usize, p: &FeatureProbabilities, omega: f64, seed: Seed) -> Result<CollectorReport> {
    check_omega(omega)?;
    let stats = coupling_stats(n, p)?;
    let original = sample_rig_with(n, p, &mut seed.with_tag(tags::FEATURES).rng());
    let y = decompose_features(&original).y;
    let run = collect_phases(n, &y, &mut seed.with_tag(tags::COUPONS).rng());

    let s1 = stats.s1;
    let ln_n = (n as f64).ln();
    let t_minus = s1 - omega * s1.sqrt();
    let t_plus = s1 + omega * s1.sqrt() + s1 / (omega * ln_n);
    let sum_y: u64 = y.iter().map(|&v| v as u64).sum();
    let t = run.total_draws as f64;
    let events = CollectorEvents {
        a_minus: run.covered_at as f64 <= t_minus,
        a_plus: run.covered_at as f64 <= t_plus,
        b1: t <= sum_y as f64 + s1 / (omega * ln_n),
        b2: (sum_y as f64 - s1).abs() <= omega * s1.sqrt(),
        b: t_minus <= t && t <= t_plus,
    };
    let rig = RigInstance::from_sorted_sets(n, run.sets);
    let delta_ge_1 = rig.project().degrees().into_iter().all(|d| d >= 1);
    let lower = !(events.a_minus && events.b) || delta_ge_1;
    let upper = !delta_ge_1 || events.a_plus || !events.b;
    Ok(CollectorReport {
        n,
        m: p.len(),
        omega,
        s1,
        t_minus,
        t_plus,
        total_draws: run.total_draws,
        sum_y,
        overhead: run.total_draws - sum_y,
        covered_at: run.covered_at,
        events,
        delta_ge_1,
        sandwich_holds: lower && upper,
    })
}

pub(crate) struct PhaseRun {
    pub sets: Vec<Vec<usize>>,
    pub total_draws: u64,
    pub covered_at: u64,
}

struct Collector {
    covered: Vec<bool>,
    covered_count: usize,
    draws: u64,
    covered_at: Option<u64>,
}

impl Collector {
    fn draw(&mut self, rng: &mut LabRng) -> usize {
        let n = self.covered.len();
        let v = rng.random_range(0..n);
        self.draws += 1;
        if !self.covered[v] {
            self.covered[v] = true;
            self.covered_count += 1;
            if self.covered_count == n {
                self.covered_at = Some(self.draws);
            }
        }
        v
    }
}

/// Runs the phases, then keeps drawing until every coupon has appeared.
pub(crate) fn collect_phases(n: usize, y: &[usize], rng: &mut LabRng) -> PhaseRun {
    let mut c = Collector { covered: vec![false; n], covered_count: 0, draws: 0, covered_at: None };
    let mut phase_mark = vec![usize::MAX; n];
    let mut sets = Vec::with_capacity(y.len());
    for (i, &yi) in y.iter().enumerate() {
        let mut set = Vec::with_capacity(yi);
        while set.len() < yi {
            let v = c.draw(rng);
            if phase_mark[v] != i {
                phase_mark[v] = i;
                set.push(v);
            }
        }
        set.sort_unstable();
        sets.push(set);
    }
    let total_draws = c.draws;
    while c.covered_at.is_none() {
        c.draw(rng);
    }
    PhaseRun { sets, total_draws, covered_at: c.covered_at.expect("loop exits once covered") }
}

/// Two-sample chi-square homogeneity test on count histograms, pooling
/// adjacent bins until each side expects at least 5 observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub pooled_bins: usize,
}

pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> ChiSquareResult {
    let len = a.len().max(b.len());
    let get = |h: &[u64], i: usize| h.get(i).copied().unwrap_or(0) as f64;
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let total = na + nb;
    let mut pools: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for i in 0..len {
        cur.0 += get(a, i);
        cur.1 += get(b, i);
        let pooled = cur.0 + cur.1;
        if total > 0.0 && pooled * na.min(nb) / total >= 5.0 {
            pools.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.0 + cur.1 > 0.0 {
        match pools.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => pools.push(cur),
        }
    }
    let bins = pools.len();
    if bins < 2 || na == 0.0 || nb == 0.0 {
        return ChiSquareResult { statistic: 0.0, dof: 0, p_value: 1.0, pooled_bins: bins };
    }
    let mut stat = 0.0;
    for &(x, y) in &pools {
        let col = x + y;
        let (ea, eb) = (col * na / total, col * nb / total);
        stat += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    let dof = bins - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    ChiSquareResult { statistic: stat, dof, p_value: 1.0 - dist.cdf(stat), pooled_bins: bins }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperedgeFrequencies {
    pub expected: f64,
    pub sigma: f64,
    pub poisson_side: Vec<f64>,
    pub independent_side: Vec<f64>,
    /// Largest `|freq - expected| / sigma` over both sides.
    pub max_z: f64,
    pub within_3_sigma: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonizationReport {
    pub n: usize,
    pub arity: usize,
    pub lambda: f64,
    pub trials: usize,
    pub alpha: f64,
    pub edge_probability: f64,
    pub expected_mean_count: f64,
    pub poisson_mean_count: f64,
    pub independent_mean_count: f64,
    pub means_within_3_sigma: bool,
    pub chi_square: ChiSquareResult,
    /// Present when there are at most 10 000 possible hyperedges.
    pub per_hyperedge: Option<HyperedgeFrequencies>,
    pub accepted: bool,
}

const PER_HYPEREDGE_LIMIT: u64 = 10_000;

fn colex_rank(set: &[usize]) -> u64 {
    set.iter().enumerate().map(|(j, &v)| binomial_u64(v as u64, j as u64 + 1).unwrap_or(0)).sum()
}

/// Paired samples of `G*_i(n, Po(λ))` and `H_i(n, 1 - e^{-λ/C(n,i)})`,
/// compared through count histograms and per-hyperedge frequencies.
pub fn poissonization_test(
    n: usize,
    arity: usize,
    lambda: f64,
    trials: usize,
    alpha: f64,
    seed: Seed,
) -> Result<PoissonizationReport> {
    if trials < 1000 {
        return Err(Error::validation(format!("at least 1000 trials required, got {trials}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::validation(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let total = binomial_u64(n as u64, arity as u64)
        .ok_or_else(|| Error::validation("hyperedge count overflows 64 bits"))?;
    if total == 0 {
        return Err(Error::validation(format!("no {arity}-subsets on {n} vertices")));
    }
    let q = poissonized_edge_probability(n, arity, lambda);
    let track = total <= PER_HYPEREDGE_LIMIT;
    let mut freq = [vec![0u64; if track { total as usize } else { 0 }], vec![0u64; if track { total as usize } else { 0 }]];
    let mut hist = [Vec::<u64>::new(), Vec::new()];
    let mut sums = [0u64; 2];
    for t in 0..trials as u64 {
        let left = sample_g_star_poisson(n, arity, lambda, seed.with_trial(t).with_tag(tags::POISSON_SIDE))?;
        let right = sample_h_independent(n, arity, q, seed.with_trial(t).with_tag(tags::INDEPENDENT_SIDE))?;
        for (side, h) in [&left, &right].into_iter().enumerate() {
            record(h, &mut hist[side], &mut sums[side], track.then_some(&mut freq[side]));
        }
    }
    let tf = trials as f64;
    let expected_mean = total as f64 * q;
    let mean_sigma = (total as f64 * q * (1.0 - q) / tf).sqrt();
    let means = [sums[0] as f64 / tf, sums[1] as f64 / tf];
    let means_ok = means.iter().all(|m| (m - expected_mean).abs() <= 3.0 * mean_sigma + f64::EPSILON);
    let chi = chi_square_homogeneity(&hist[0], &hist[1]);
    let per_hyperedge = track.then(|| {
        let sigma = (q * (1.0 - q) / tf).sqrt();
        let to_freq = |c: &Vec<u64>| c.iter().map(|&k| k as f64 / tf).collect::<Vec<_>>();
        let (a, b) = (to_freq(&freq[0]), to_freq(&freq[1]));
        let max_z = a
            .iter()
            .chain(&b)
            .map(|f| if sigma > 0.0 { (f - q).abs() / sigma } else if (f - q).abs() > 0.0 { f64::INFINITY } else { 0.0 })
            .fold(0.0, f64::max);
        HyperedgeFrequencies { expected: q, sigma, poisson_side: a, independent_side: b, max_z, within_3_sigma: max_z <= 3.0 }
    });
    let accepted = chi.p_value >= alpha && per_hyperedge.as_ref().is_none_or(|h| h.within_3_sigma);
    Ok(PoissonizationReport {
        n,
        arity,
        lambda,
        trials,
        alpha,
        edge_probability: q,
        expected_mean_count: expected_mean,
        poisson_mean_count: means[0],
        independent_mean_count: means[1],
        means_within_3_sigma: means_ok,
        chi_square: chi,
        per_hyperedge,
        accepted,
    })
}

fn record(h: &UniformHypergraph, hist: &mut Vec<u64>, sum: &mut u64, freq: Option<&mut Vec<u64>>) {
    let count = h.hyperedge_count();
    if hist.len() <= count {
        hist.resize(count + 1, 0);
    }
    hist[count] += 1;
    *sum += count as u64;
    if let Some(freq) = freq {
        for e in h.hyperedges() {
            freq[colex_rank(e) as usize] += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::sample_rig;
    use crate::threshold::homogeneous_p_for_target;

    #[test]
    fn decomposition_examples() {
        let d = FeatureDecomposition::from_sizes(vec![0, 0]);
        assert_eq!((d.m2, d.m3, d.y.clone()), (0, 0, vec![0, 0]));
        let d = FeatureDecomposition::from_sizes(vec![5]);
        assert_eq!((d.y[0], d.z[0], d.m2, d.m3), (5, 1, 1, 1));
        let d = FeatureDecomposition::from_sizes(vec![1]);
        assert_eq!((d.y[0], d.m2, d.m3), (0, 0, 0));
        let d = FeatureDecomposition::from_sizes(vec![2, 3, 4, 7, 1]);
        // Sizes 2, 4, 7 contribute 1, 2, 2 pairs; 3 is a single triple.
        assert_eq!(d.m2, 5);
        assert_eq!(d.m3, 2);
        assert_eq!(d.sum_y(), 16);
    }

    #[test]
    fn couple_feature_examples() {
        let (g, set) = couple_feature(0, 0, 10, Seed::new(1)).unwrap();
        assert_eq!((g.edge_count(), set.len()), (0, 0));
        let (g, set) = couple_feature(2, 0, 10, Seed::new(2)).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(set, vec![g.edges()[0].0, g.edges()[0].1]);
        let (g, set) = couple_feature(3, 1, 10, Seed::new(3)).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g, SimpleGraph::clique_on(10, &set).unwrap());
        assert!(couple_feature(4, 1, 10, Seed::new(0)).is_err());
        assert!(couple_feature(1, 1, 10, Seed::new(0)).is_err());
        assert!(couple_feature(11, 1, 10, Seed::new(0)).is_err());
    }

    #[test]
    fn couple_feature_stays_inside_its_clique() {
        let mut rng = Seed::new(77).rng();
        for t in 0..2000 {
            let n = rng.random_range(2..60);
            let y = match rng.random_range(2..=n) {
                1 => 0,
                v => v,
            };
            let (g, set) = couple_feature(y, (y % 2) as u8, n, Seed::new(t)).unwrap();
            assert_eq!(set.len(), y);
            assert!(set.windows(2).all(|w| w[0] < w[1]));
            assert!(g.is_subgraph_of(&SimpleGraph::clique_on(n, &set).unwrap()).unwrap());
        }
    }

    #[test]
    fn per_feature_stage_is_exact() {
        let p = FeatureProbabilities::homogeneous(200, 0.01).unwrap();
        for t in 0..500 {
            let r = run_coupling_trial(200, &p, 2.0, Seed::new(5).with_trial(t)).unwrap();
            assert!(r.per_feature_contained);
            if r.m2_prime <= r.m2 && r.m3_prime <= r.m3 {
                assert!(r.contained, "trial {t}");
            }
        }
    }

    #[test]
    fn near_empty_feature_gives_empty_graphs() {
        let p = FeatureProbabilities::homogeneous(1, 1e-9).unwrap();
        let r = run_coupling_trial(10, &p, 2.0, Seed::new(1)).unwrap();
        assert!(r.contained);
        assert_eq!((r.prefix_edge_count, r.rig_edge_count), (0, 0));
        assert!(!r.guard_events.poisson_m2_ok);
        assert!(r.regime_infeasible);
    }

    #[test]
    fn coupled_rig_matches_rig_in_distribution() {
        let n = 4;
        let p = FeatureProbabilities::new(vec![0.4, 0.6]).unwrap();
        let trials = 40_000;
        let mut a = vec![0u64; 64];
        let mut b = vec![0u64; 64];
        let code = |g: &SimpleGraph| {
            g.edges().iter().map(|&(u, v)| 1usize << (u * n + v - (u + 1) * (u + 2) / 2)).sum::<usize>()
        };
        for t in 0..trials {
            let coupled = coupled_instance(n, &p, Seed::new(11).with_trial(t)).unwrap();
            a[code(&coupled.rig.project())] += 1;
            b[code(&sample_rig(n, &p, Seed::new(12).with_trial(t)).unwrap().project())] += 1;
        }
        let (a, b): (Vec<u64>, Vec<u64>) = a.into_iter().zip(b).filter(|&(x, y)| x + y > 0).unzip();
        let chi = chi_square_homogeneity(&a, &b);
        assert!(chi.p_value > 0.001, "{chi:?}");
    }

    #[test]
    fn collector_examples() {
        // Every feature empty.
        let p = FeatureProbabilities::homogeneous(3, 1e-12).unwrap();
        let r = coupon_collector_trial(20, &p, 2.0, Seed::new(1)).unwrap();
        assert_eq!((r.total_draws, r.sum_y, r.overhead), (0, 0, 0));
        assert!(!r.delta_ge_1);
        assert!(r.covered_at >= 20);
        // One phase collecting all coupons.
        let mut rng = Seed::new(2).rng();
        let run = collect_phases(15, &[15], &mut rng);
        assert_eq!(run.covered_at, run.total_draws);
        let rig = RigInstance::from_sorted_sets(15, run.sets);
        assert_eq!(rig.project(), SimpleGraph::complete(15));
    }

    #[test]
    fn collector_invariants_hold_per_trial() {
        let n = 300;
        let p = homogeneous_p_for_target(n, n, (n as f64).ln() / n as f64 * 1.0).unwrap();
        let p = FeatureProbabilities::homogeneous(n, p).unwrap();
        for t in 0..200 {
            let r = coupon_collector_trial(n, &p, 2.0, Seed::new(9).with_trial(t)).unwrap();
            assert!(r.total_draws >= r.sum_y);
            assert!(r.covered_at >= n as u64);
            assert!(r.sandwich_holds, "trial {t}");
            assert_eq!(r.delta_ge_1, r.covered_at <= r.total_draws);
            assert!(!r.events.a_minus || r.events.a_plus);
        }
    }

    #[test]
    fn chi_square_basics() {
        let same = chi_square_homogeneity(&[100, 200, 300], &[100, 200, 300]);
        assert_eq!(same.statistic, 0.0);
        assert!((same.p_value - 1.0).abs() < 1e-12);
        let diff = chi_square_homogeneity(&[500, 100], &[100, 500]);
        assert!(diff.p_value < 1e-10);
        let tiny = chi_square_homogeneity(&[1, 1], &[1, 0]);
        assert_eq!(tiny.dof, 0);
    }

    #[test]
    fn poissonization_zero_lambda_accepts() {
        let r = poissonization_test(5, 2, 0.0, 1000, 0.01, Seed::new(1)).unwrap();
        assert!(r.accepted);
        assert_eq!(r.poisson_mean_count, 0.0);
        assert_eq!(r.independent_mean_count, 0.0);
    }

    #[test]
    fn poissonization_edge_mean_small_case() {
        let r = poissonization_test(4, 2, 2.0, 20_000, 0.01, Seed::new(21)).unwrap();
        assert!((r.expected_mean_count - 6.0 * (1.0 - (-1.0f64 / 3.0).exp())).abs() < 1e-12);
        assert!((r.expected_mean_count - 1.700_812_1).abs() < 1e-7);
        assert!(r.means_within_3_sigma, "{r:?}");
        assert!(poissonization_test(4, 2, 2.0, 999, 0.01, Seed::new(0)).is_err());
    }

    #[test]
    fn colex_rank_inverts_unranking() {
        use crate::combin::{unrank_pair, unrank_triple};
        for r in 0..500 {
            assert_eq!(colex_rank(&unrank_pair(r)), r);
            assert_eq!(colex_rank(&unrank_triple(r)), r);
        }
    }
}

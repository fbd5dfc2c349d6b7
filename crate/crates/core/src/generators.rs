//! Seeded samplers for the random models: the intersection graph
//! `G(n, m, p̄)`, the independent hypergraph `H_i(n, p̂)`, the draw model
//! `G*_i(n, M)` and its Poissonized form.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combin::{binomial_u64, unrank_pair, unrank_triple};
use crate::error::{Error, Result};
use crate::graph::{RigInstance, UniformHypergraph};
use crate::poisson::sample_poisson;
use crate::seed::{LabRng, Seed};

/// Feature selection probabilities `p_1..p_m`, each strictly inside (0, 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureProbabilities(Vec<f64>);

impl FeatureProbabilities {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("at least one feature probability is required"));
        }
        if let Some((i, p)) = values
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p > 0.0 && **p < 1.0))
        {
            return Err(Error::validation(format!(
                "feature probability p[{i}] = {p} is not strictly inside (0, 1)"
            )));
        }
        Ok(FeatureProbabilities(values))
    }

    pub fn homogeneous(m: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; m])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Some(p)` when every entry equals `p`.
    pub fn common_value(&self) -> Option<f64> {
        let first = self.0[0];
        self.0.iter().all(|&p| p == first).then_some(first)
    }
}

impl TryFrom<Vec<f64>> for FeatureProbabilities {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<FeatureProbabilities> for Vec<f64> {
    fn from(p: FeatureProbabilities) -> Self {
        p.0
    }
}

/// Number of failures before the first success, for success probability
/// `p` given as `ln(1 - p)`. Returns `f64::INFINITY` when `p == 0`.
fn geometric_skip<R: Rng + ?Sized>(rng: &mut R, ln_q: f64) -> f64 {
    if ln_q == 0.0 {
        return f64::INFINITY;
    }
    if ln_q == f64::NEG_INFINITY {
        return 0.0;
    }
    let u = 1.0 - rng.random::<f64>(); // (0, 1]
    (u.ln() / ln_q).floor()
}

/// Positions in `0..total` kept independently with probability `p`, visited
/// in increasing order via geometric skips.
fn bernoulli_positions<R: Rng + ?Sized>(
    rng: &mut R,
    total: u64,
    p: f64,
    mut visit: impl FnMut(u64),
) {
    if p <= 0.0 || total == 0 {
        return;
    }
    let ln_q = (-p).ln_1p();
    let mut next = 0u64;
    loop {
        let skip = geometric_skip(rng, ln_q);
        if skip >= (total - next) as f64 {
            return;
        }
        let pos = next + skip as u64;
        visit(pos);
        next = pos + 1;
        if next >= total {
            return;
        }
    }
}

/// Samples `G(n, m, p̄)`: vertex `v` joins `V_i` independently with
/// probability `p_i`. Runs in `O(m + Σ|V_i|)`.
pub fn sample_rig(n: usize, p: &FeatureProbabilities, seed: Seed) -> Result<RigInstance> {
    if n == 0 {
        return Err(Error::validation("vertex count must be at least 1"));
    }
    let mut rng = seed.rng();
    Ok(sample_rig_with(n, p, &mut rng))
}

pub(crate) fn sample_rig_with(n: usize, p: &FeatureProbabilities, rng: &mut LabRng) -> RigInstance {
    let sets = p
        .values()
        .iter()
        .map(|&pi| {
            let mut set = Vec::new();
            bernoulli_positions(rng, n as u64, pi, |v| set.push(v as usize));
            set
        })
        .collect();
    RigInstance::from_sorted_sets(n, sets)
}

fn check_arity(arity: usize) -> Result<()> {
    if arity == 2 || arity == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedArity(arity))
    }
}

fn subset_count(n: usize, arity: usize) -> Result<u64> {
    binomial_u64(n as u64, arity as u64)
        .ok_or_else(|| Error::validation(format!("C({n}, {arity}) overflows 64 bits")))
}

fn unrank(arity: usize, rank: u64) -> Vec<usize> {
    match arity {
        2 => unrank_pair(rank).to_vec(),
        3 => unrank_triple(rank).to_vec(),
        _ => unreachable!("arity checked by caller"),
    }
}

/// Samples `H_i(n, p̂)`: each `i`-subset is a hyperedge independently with
/// probability `phat`. Cost is proportional to the number of hits.
pub fn sample_h_independent(n: usize, arity: usize, phat: f64, seed: Seed) -> Result<UniformHypergraph> {
    check_arity(arity)?;
    if !(0.0..=1.0).contains(&phat) {
        return Err(Error::validation(format!("phat = {phat} is not a probability")));
    }
    let total = subset_count(n, arity)?;
    let mut rng = seed.rng();
    let mut hyperedges = Vec::new();
    bernoulli_positions(&mut rng, total, phat, |rank| hyperedges.push(unrank(arity, rank)));
    // Colex order of ranks differs from lexicographic order of sets.
    Ok(UniformHypergraph::from_sorted_sets(n, arity, hyperedges))
}

/// Uniform draws (with repetition) of `i`-subsets of `0..n`.
///
/// Taking the first `t` draws of one stream realizes `G*_i(n, t)` for every
/// `t` at once, which is what makes draw-count couplings monotone.
#[derive(Clone, Debug)]
pub struct DrawStream {
    rng: LabRng,
    arity: usize,
    total: u64,
    drawn: u64,
}

impl DrawStream {
    pub fn new(n: usize, arity: usize, seed: Seed) -> Result<Self> {
        Self::with_rng(n, arity, seed.rng())
    }

    pub(crate) fn with_rng(n: usize, arity: usize, rng: LabRng) -> Result<Self> {
        check_arity(arity)?;
        let total = subset_count(n, arity)?;
        if total == 0 {
            return Err(Error::validation(format!(
                "no {arity}-subsets exist on {n} vertices"
            )));
        }
        Ok(DrawStream {
            rng,
            arity,
            total,
            drawn: 0,
        })
    }

    pub fn next_set(&mut self) -> Vec<usize> {
        self.drawn += 1;
        let rank = self.rng.random_range(0..self.total);
        unrank(self.arity, rank)
    }

    pub fn drawn(&self) -> u64 {
        self.drawn
    }
}

/// Samples `G*_i(n, M)` as a hypergraph: `draws` uniform `i`-subsets,
/// repeated ones kept once.
pub fn sample_g_star(n: usize, arity: usize, draws: u64, seed: Seed) -> Result<UniformHypergraph> {
    check_arity(arity)?;
    if draws == 0 {
        return Ok(UniformHypergraph::empty(n, arity));
    }
    let mut stream = DrawStream::new(n, arity, seed)?;
    Ok(hypergraph_from_prefix(n, arity, &mut stream, draws))
}

pub(crate) fn hypergraph_from_prefix(
    n: usize,
    arity: usize,
    stream: &mut DrawStream,
    draws: u64,
) -> UniformHypergraph {
    let sets = (0..draws).map(|_| stream.next_set()).collect();
    UniformHypergraph::from_sorted_sets(n, arity, sets)
}

/// Samples `G*_i(n, Po(lambda))`. Equal in law to
/// `H_i(n, 1 - exp(-lambda / C(n, i)))`.
pub fn sample_g_star_poisson(n: usize, arity: usize, lambda: f64, seed: Seed) -> Result<UniformHypergraph> {
    check_arity(arity)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::validation(format!("lambda = {lambda} must be finite and non-negative")));
    }
    let mut rng = seed.rng();
    let draws = sample_poisson(&mut rng, lambda);
    if draws == 0 {
        return Ok(UniformHypergraph::empty(n, arity));
    }
    let mut stream = DrawStream::with_rng(n, arity, rng)?;
    Ok(hypergraph_from_prefix(n, arity, &mut stream, draws))
}

/// Hyperedge presence probability of the Poissonized draw model.
pub fn poissonized_edge_probability(n: usize, arity: usize, lambda: f64) -> f64 {
    let total = crate::combin::binomial_f64(n, arity);
    -(-lambda / total).exp_m1()
}

//! Closed-form feature statistics, coupling parameters and threshold
//! formulas, with the inversions needed to parameterize experiments.
//!
//! For a feature with probability `p` on `n` vertices let `X ~ Bin(n, p)`.
//! Per feature, `S1` is `E[X; X >= 2]`, `S3` is `P(X odd, X >= 3)` and `S2`
//! is the remainder `S1 - S3`. `S_{1,t}` is `t * P(X = t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::FeatureProbabilities;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub const DEFAULT_T_MAX: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdStats {
    pub n: usize,
    pub m: usize,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    /// `s1t[j]` holds `S_{1, j+2}`.
    pub s1t: Vec<f64>,
    pub a_n: f64,
}

impl ThresholdStats {
    pub fn t_max(&self) -> usize {
        self.s1t.len() + 1
    }

    /// `S_{1,t}` for `2 <= t <= t_max`.
    pub fn s1_at(&self, t: usize) -> Option<f64> {
        t.checked_sub(2).and_then(|j| self.s1t.get(j)).copied()
    }
}

/// `(1-p)^(n-1)` without cancellation.
fn pow_one_minus(p: f64, e: usize) -> f64 {
    (e as f64 * (-p).ln_1p()).exp()
}

/// `g(p) = p (1 - (1-p)^(n-1))`, so that `S1 = n * Σ g(p_i)`.
pub fn edge_mass(n: usize, p: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    p * -((n - 1) as f64 * (-p).ln_1p()).exp_m1()
}

/// `P(X odd)` for `X ~ Bin(n, p)`, i.e. `(1 - (1-2p)^n) / 2`.
fn odd_probability(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    if p < 0.5 {
        -(nf * (-2.0 * p).ln_1p()).exp_m1() / 2.0
    } else if p == 0.5 {
        0.5
    } else {
        let magnitude = (nf * (2.0 * p - 1.0).ln()).exp();
        let r = if n.is_multiple_of(2) { magnitude } else { -magnitude };
        (1.0 - r) / 2.0
    }
}

/// Per-feature `(S1, S2, S3)` contributions.
fn feature_terms(n: usize, p: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    if nf * p <= 1.0 {
        // Closed forms cancel badly here; the binomial tail converges fast.
        let ratio = p / (1.0 - p);
        let mut pmf = (nf * (-p).ln_1p()).exp();
        let (mut s1, mut s2, mut s3) = (KahanSum::default(), KahanSum::default(), KahanSum::default());
        for t in 0..n {
            pmf *= (n - t) as f64 / (t + 1) as f64 * ratio;
            let t = t + 1;
            if t < 2 {
                continue;
            }
            let tf = t as f64;
            s1.add(tf * pmf);
            if t % 2 == 0 {
                s2.add(tf * pmf);
            } else {
                s2.add((tf - 1.0) * pmf);
                s3.add(pmf);
            }
            if tf * pmf <= 1e-18 * s1.value() || pmf == 0.0 {
                break;
            }
        }
        (s1.value(), s2.value(), s3.value())
    } else {
        let np = nf * p;
        let single = np * pow_one_minus(p, n - 1);
        let odd = odd_probability(n, p);
        let s1 = np * -((n - 1) as f64 * (-p).ln_1p()).exp_m1();
        // With n < 3 no odd size reaches 3; the difference is pure rounding.
        let s3 = if n < 3 { 0.0 } else { (odd - single).max(0.0) };
        (s1, np - odd, s3)
    }
}

/// `t * C(n,t) p^t (1-p)^(n-t)` for `t = 2..=t_max`.
fn size_terms(n: usize, p: f64, t_max: usize) -> Vec<f64> {
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mut ln_choose = 0.0; // ln C(n, 0)
    let mut out = Vec::with_capacity(t_max.saturating_sub(1));
    for t in 1..=t_max {
        ln_choose += ((n - t + 1) as f64).ln() - (t as f64).ln();
        if t >= 2 {
            let tf = t as f64;
            out.push(tf * (ln_choose + tf * ln_p + (n - t) as f64 * ln_q).exp());
        }
    }
    out
}

/// Evaluates `S1, S2, S3` and `S_{1,t}` for `t = 2..=t_max`.
pub fn summary_stats(n: usize, p: &FeatureProbabilities, t_max: usize) -> Result<ThresholdStats> {
    if n < 2 {
        return Err(Error::validation(format!("summary statistics need n >= 2, got {n}")));
    }
    if !(2..=n).contains(&t_max) {
        return Err(Error::validation(format!("t_max = {t_max} must lie in 2..={n}")));
    }
    let m = p.len();
    let (s1, s2, s3, s1t) = if let Some(common) = p.common_value() {
        let (a, b, c) = feature_terms(n, common);
        let mf = m as f64;
        let s1t: Vec<f64> = size_terms(n, common, t_max).into_iter().map(|x| x * mf).collect();
        (a * mf, b * mf, c * mf, s1t)
    } else {
        let (mut a, mut b, mut c) = (KahanSum::default(), KahanSum::default(), KahanSum::default());
        let mut s1t = vec![KahanSum::default(); t_max - 1];
        for &pi in p.values() {
            let (x, y, z) = feature_terms(n, pi);
            a.add(x);
            b.add(y);
            c.add(z);
            for (acc, term) in s1t.iter_mut().zip(size_terms(n, pi, t_max)) {
                acc.add(term);
            }
        }
        (a.value(), b.value(), c.value(), s1t.iter().map(KahanSum::value).collect())
    };
    let a_n = if s1 > 0.0 { (s1t[0] / s1).clamp(0.0, 1.0) } else { 0.0 };
    Ok(ThresholdStats { n, m, s1, s2, s3, s1t, a_n })
}

/// `S1` alone, as used by planners.
pub fn s1_only(n: usize, p: &FeatureProbabilities) -> f64 {
    let nf = n as f64;
    match p.common_value() {
        Some(c) => nf * edge_mass(n, c) * p.len() as f64,
        None => nf * p.values().iter().map(|&pi| edge_mass(n, pi)).collect::<KahanSum>().value(),
    }
}

/// `max(2, ln ln n)`.
pub fn default_omega(n: usize) -> f64 {
    let ll = (n as f64).ln().ln();
    if ll.is_finite() {
        ll.max(2.0)
    } else {
        2.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    DominantS3,
    SmallS3,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Linear forms, valid for `S1 = o(n^2)`.
    #[default]
    Linear,
    /// `1 - exp(-x)` forms, valid for `S1 = Ω(n^2)`.
    Exponential,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClampFlags {
    pub p_hat: bool,
    pub p_hat2: bool,
    pub p_hat3: bool,
}

impl ClampFlags {
    pub fn any(&self) -> bool {
        self.p_hat || self.p_hat2 || self.p_hat3
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingParameters {
    pub p_hat: f64,
    pub p_hat2: f64,
    pub p_hat3: f64,
    pub regime: Regime,
    pub variant: Variant,
    pub omega: f64,
    pub clamped: ClampFlags,
}

/// Clamps into `[0, 1]`; the flag records whether clamping happened.
fn clamp_probability(x: f64) -> (f64, bool) {
    if x < 0.0 || x.is_nan() {
        (0.0, true)
    } else if x > 1.0 {
        (1.0, true)
    } else {
        (x, false)
    }
}

/// `1 - exp(-x)`, with negative `x` clamped to 0.
fn exp_form(x: f64) -> (f64, bool) {
    if x < 0.0 {
        (0.0, true)
    } else {
        (-(-x).exp_m1(), false)
    }
}

/// Parameters `p̂, p̂₂, p̂₃` of the graphs coupled below the intersection
/// graph. The dominant branch is chosen when `S3 > ω² √S1`.
pub fn coupling_parameters(stats: &ThresholdStats, omega: f64, variant: Variant) -> Result<CouplingParameters> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::validation(format!("omega = {omega} must be positive")));
    }
    let n = stats.n as f64;
    let (s1, s2, s3) = (stats.s1, stats.s2, stats.s3);
    let pairs2 = n * (n - 1.0); // 2 C(n, 2)
    let triples = n * (n - 1.0) * (n - 2.0) / 6.0;
    let sq1 = s1.sqrt();
    let regime = if s3 > omega * omega * sq1 {
        Regime::DominantS3
    } else {
        Regime::SmallS3
    };
    let mut clamped = ClampFlags::default();
    let (p_hat, p_hat2, p_hat3);
    match variant {
        Variant::Linear => {
            let x = (s2 - omega * s2.sqrt() - 2.0 * s2 * s2 / (n * n)) / pairs2;
            (p_hat, clamped.p_hat) = clamp_probability(x);
            match regime {
                Regime::DominantS3 => {
                    let x2 = (s1 - 3.0 * s3 - omega * sq1 - 2.0 * s1 * s1 / (n * n)) / pairs2;
                    (p_hat2, clamped.p_hat2) = clamp_probability(x2);
                    let x3 = if triples > 0.0 {
                        (s3 - omega * sq1 - 6.0 * s3 * s3 / (n * n * n)) / triples
                    } else {
                        0.0
                    };
                    (p_hat3, clamped.p_hat3) = clamp_probability(x3);
                }
                Regime::SmallS3 => {
                    let x2 = (s1 - omega * sq1 - 2.0 * s1 * s1 / (n * n)) / pairs2;
                    (p_hat2, clamped.p_hat2) = clamp_probability(x2);
                    p_hat3 = 0.0;
                }
            }
        }
        Variant::Exponential => {
            (p_hat, clamped.p_hat) = exp_form((s2 - omega * s2.sqrt()) / pairs2);
            match regime {
                Regime::DominantS3 => {
                    (p_hat2, clamped.p_hat2) = exp_form((s1 - 3.0 * s3 - omega * sq1) / pairs2);
                    (p_hat3, clamped.p_hat3) = if triples > 0.0 {
                        exp_form((s3 - omega * sq1) / triples)
                    } else {
                        (0.0, false)
                    };
                }
                Regime::SmallS3 => {
                    (p_hat2, clamped.p_hat2) = exp_form((s1 - omega * sq1) / pairs2);
                    p_hat3 = 0.0;
                }
            }
        }
    }
    Ok(CouplingParameters {
        p_hat,
        p_hat2,
        p_hat3,
        regime,
        variant,
        omega,
        clamped,
    })
}

/// JSON document printed by `rig-lab stats`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "S1")]
    pub s1: f64,
    #[serde(rename = "S2")]
    pub s2: f64,
    #[serde(rename = "S3")]
    pub s3: f64,
    #[serde(rename = "S1t")]
    pub s1t: Vec<f64>,
    pub a_n: f64,
    pub p_hat: f64,
    pub p_hat2: f64,
    pub p_hat3: f64,
    pub regime: Regime,
    pub omega: f64,
    pub variant: Variant,
    pub clamped: ClampFlags,
}

impl StatsReport {
    pub fn new(stats: &ThresholdStats, params: &CouplingParameters) -> Self {
        StatsReport {
            n: stats.n,
            m: stats.m,
            s1: stats.s1,
            s2: stats.s2,
            s3: stats.s3,
            s1t: stats.s1t.clone(),
            a_n: stats.a_n,
            p_hat: params.p_hat,
            p_hat2: params.p_hat2,
            p_hat3: params.p_hat3,
            regime: params.regime,
            omega: params.omega,
            variant: params.variant,
            clamped: params.clamped,
        }
    }
}

/// Double-exponential limit law `f(c) = exp(-exp(-c))`, with `f(-∞) = 0`
/// and `f(+∞) = 1`.
pub fn limit_probability(c: f64) -> Result<f64> {
    if c.is_nan() {
        return Err(Error::validation("limit_probability of NaN"));
    }
    Ok((-(-c).exp()).exp())
}

/// Which threshold display a `c` is read off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdForm {
    /// `S1 = n (ln n + (k-1) ln ln n + c)`.
    Connectivity { k: u32 },
    /// `S1 = n (ln n + ln ln n + c)`.
    Hamiltonicity,
}

impl ThresholdForm {
    /// Number of `ln ln n` terms in the display.
    fn lnln_multiplier(&self) -> f64 {
        match self {
            ThresholdForm::Connectivity { k } => f64::from(k.saturating_sub(1)),
            ThresholdForm::Hamiltonicity => 1.0,
        }
    }

    /// Target `S1` for a given `c`.
    pub fn target_s1(&self, n: usize, c: f64) -> Result<f64> {
        let mult = self.lnln_multiplier();
        let nf = n as f64;
        let lnln = if mult > 0.0 {
            if n < 3 {
                return Err(Error::Domain(format!("ln ln n needs n >= 3, got {n}")));
            }
            nf.ln().ln()
        } else {
            0.0
        };
        Ok(nf * (nf.ln() + mult * lnln + c))
    }
}

/// Reads `c` off `S1`: the exact inverse of [`ThresholdForm::target_s1`].
pub fn c_from_s1(n: usize, s1: f64, form: ThresholdForm) -> Result<f64> {
    if s1 < 0.0 || s1.is_nan() {
        return Err(Error::validation(format!("S1 = {s1} must be non-negative")));
    }
    let mult = form.lnln_multiplier();
    if n < 2 || (mult > 0.0 && n < 3) {
        return Err(Error::Domain(format!("n = {n} too small for this threshold form")));
    }
    let nf = n as f64;
    let lnln = if mult > 0.0 { nf.ln().ln() } else { 0.0 };
    Ok(s1 / nf - nf.ln() - mult * lnln)
}

/// Solves `p (1 - (1-p)^(n-1)) = rhs` for `p` by bisection.
pub fn homogeneous_p_for_target(n: usize, m: usize, rhs: f64) -> Result<f64> {
    if n < 2 || m == 0 {
        return Err(Error::validation(format!("need n >= 2 and m >= 1, got n = {n}, m = {m}")));
    }
    // g increases from 0 to 1 on (0, 1).
    if !(rhs > 0.0 && rhs < 1.0) {
        return Err(Error::OutOfRange {
            target: rhs,
            reason: "p (1 - (1-p)^(n-1)) takes values in (0, 1) only".into(),
        });
    }
    let g = |p: f64| edge_mass(n, p);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // Shrink hi geometrically first so bisection starts with a tight bracket.
    while g(hi * 0.5) > rhs {
        hi *= 0.5;
    }
    lo = lo.max(hi * 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < rhs {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let p = 0.5 * (lo + hi);
    let residual = (g(p) - rhs).abs() / rhs;
    if residual > 1e-10 || !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange {
            target: rhs,
            reason: format!("bisection residual {residual:e} too large"),
        });
    }
    Ok(p)
}

/// Refined homogeneous thresholds (numerator without the `c` term).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum RefinedKind {
    /// Hamiltonicity.
    Hamilton,
    /// k-connectivity.
    Connectivity { k: u32 },
    /// Minimum degree at least k (same display as k-connectivity).
    MinDegree { k: u32 },
}

/// `ln n + ln max{1, ...}` for the refined homogeneous threshold displays.
pub fn refined_threshold_rhs(n: usize, p: f64, kind: RefinedKind) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::validation(format!("p = {p} must lie strictly inside (0, 1)")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("n = {n} too small")));
    }
    let ln_n = (n as f64).ln();
    let x = n as f64 * p;
    // e^{-x} ln n / (1 - e^{-x})
    let r = (-x).exp() * ln_n / -(-x).exp_m1();
    let inner = match kind {
        RefinedKind::Hamilton => (x * r).ln(),
        RefinedKind::Connectivity { k } | RefinedKind::MinDegree { k } => {
            if k == 0 {
                return Err(Error::validation("k must be at least 1"));
            }
            let e = f64::from(k - 1);
            x.powf(e) * (r.powf(e) + r)
        }
    };
    Ok(ln_n + inner.max(1.0).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryParameters {
    pub gamma: f64,
    /// Solves `β γ (1 - e^{-γ}) = 1`.
    pub beta: f64,
    /// `1 + γ e^{-γ} / (1 - e^{-γ})`, the factor in front of `b_n`.
    pub slope: f64,
}

pub fn corollary_parameters(gamma: f64) -> Result<CorollaryParameters> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
    }
    let one_minus = -(-gamma).exp_m1();
    Ok(CorollaryParameters {
        gamma,
        beta: 1.0 / (gamma * one_minus),
        slope: 1.0 + (-gamma).exp() * gamma / one_minus,
    })
}

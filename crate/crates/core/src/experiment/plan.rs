//! Turning a grid value `c` into concrete model parameters.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Profile, Theorem};
use crate::error::{Error, Result};
use crate::generators::FeatureProbabilities;
use crate::threshold::{
    edge_mass, homogeneous_p_for_target, refined_threshold_rhs, s1_only, summary_stats, RefinedKind, ThresholdForm,
    DEFAULT_T_MAX,
};

/// A fully specified model for one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedPoint {
    pub c: f64,
    pub vertex_count: usize,
    pub m: usize,
    /// Common probability for homogeneous profiles.
    pub p: Option<f64>,
    /// Multiplier applied to an explicit or parametric shape.
    pub scale: Option<f64>,
    /// Target `S1` (S1-based displays) or target `m g(p)` (refined ones).
    pub target: f64,
    pub s1: f64,
    pub a_n: f64,
    #[serde(skip)]
    pub probabilities: Option<FeatureProbabilities>,
}

impl PlannedPoint {
    pub fn probabilities(&self) -> &FeatureProbabilities {
        self.probabilities.as_ref().expect("planned points carry their probabilities")
    }
}

const SCALE_TOLERANCE: f64 = 1e-8;
const P_CEILING: f64 = 1.0 - 1e-12;
const P_FLOOR: f64 = 1e-300;

fn planning(c: f64, reason: impl Into<String>) -> Error {
    Error::Planning { c, reason: reason.into() }
}

fn threshold_form(theorem: Theorem, k: u32) -> ThresholdForm {
    match theorem {
        Theorem::Connectivity | Theorem::PerfectMatching | Theorem::MinDegree => ThresholdForm::Connectivity { k: 1 },
        Theorem::KConnectivity => ThresholdForm::Connectivity { k },
        _ => ThresholdForm::Hamiltonicity,
    }
}

fn refined_kind(theorem: Theorem, k: u32) -> RefinedKind {
    match theorem {
        Theorem::HamiltonicityRefined => RefinedKind::Hamilton,
        Theorem::KConnectivityRefined => RefinedKind::Connectivity { k },
        _ => RefinedKind::MinDegree { k },
    }
}

/// Shape before scaling.
fn base_shape(cfg: &ExperimentConfig) -> Option<Vec<f64>> {
    match &cfg.profile {
        Profile::Homogeneous => None,
        Profile::Explicit { p } => Some(p.clone()),
        Profile::PowerLaw { exponent } => Some((1..=cfg.m).map(|i| (i as f64).powf(-exponent)).collect()),
    }
}

fn scaled(base: &[f64], s: f64) -> FeatureProbabilities {
    let v = base.iter().map(|&b| (b * s).clamp(P_FLOOR, P_CEILING)).collect();
    FeatureProbabilities::new(v).expect("clamped into (0, 1)")
}

/// Finds `s` with `S1(s p̄) = target` to relative accuracy `1e-8`.
pub fn scale_profile_to_s1(n: usize, base: &[f64], target: f64, c: f64) -> Result<(f64, FeatureProbabilities)> {
    if target.is_nan() || target <= 0.0 {
        return Err(planning(c, format!("target S1 = {target} is not positive")));
    }
    let s1 = |s: f64| s1_only(n, &scaled(base, s));
    let ceiling = P_CEILING / base.iter().copied().fold(f64::INFINITY, f64::min);
    if s1(ceiling) < target {
        return Err(planning(c, format!("target S1 = {target} exceeds the largest attainable value")));
    }
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while s1(lo) > target {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(planning(c, "target S1 below the attainable range"));
        }
    }
    while s1(hi) < target {
        hi = (hi * 2.0).min(ceiling);
    }
    let mut s = hi;
    for _ in 0..300 {
        s = 0.5 * (lo + hi);
        let v = s1(s);
        if (v - target).abs() <= 1e-12 * target || s <= lo || s >= hi {
            break;
        }
        if v < target {
            lo = s;
        } else {
            hi = s;
        }
    }
    let probs = scaled(base, s);
    let residual = (s1_only(n, &probs) - target).abs() / target;
    if residual > SCALE_TOLERANCE {
        return Err(planning(c, format!("scaling residual {residual:e} above {SCALE_TOLERANCE:e}")));
    }
    Ok((s, probs))
}

/// Solves `m g(p) = rhs(p) + c` for a refined homogeneous display.
fn solve_refined(n: usize, m: usize, kind: RefinedKind, c: f64) -> Result<(f64, f64)> {
    let h = |p: f64| -> Result<f64> { Ok(m as f64 * edge_mass(n, p) - refined_threshold_rhs(n, p, kind)? - c) };
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, P_CEILING);
    if h(lo)? >= 0.0 {
        return Err(planning(c, "threshold numerator is not positive"));
    }
    if h(hi)? <= 0.0 {
        return Err(planning(c, format!("target exceeds m g(p) <= {m}")));
    }
    // Geometric bisection first: p spans many orders of magnitude.
    for _ in 0..2000 {
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let rhs = refined_threshold_rhs(n, p, kind)? + c;
    let residual = h(p)?.abs() / rhs.abs().max(1.0);
    if residual > 1e-9 {
        return Err(planning(c, format!("refined solve residual {residual:e}")));
    }
    Ok((p, rhs))
}

/// Model parameters for grid value `c`.
pub fn plan_point(cfg: &ExperimentConfig, c: f64) -> Result<PlannedPoint> {
    cfg.validate()?;
    let n = cfg.vertex_count();
    let m = cfg.m;
    let k = cfg.k_value();
    let (p, scale, target, probs) = if cfg.theorem.is_refined() {
        let (p, rhs) = solve_refined(n, m, refined_kind(cfg.theorem, k), c)?;
        (Some(p), None, rhs, FeatureProbabilities::homogeneous(m, p)?)
    } else {
        let target = threshold_form(cfg.theorem, k).target_s1(n, c)?;
        match base_shape(cfg) {
            None => {
                let per_feature = target / (n as f64 * m as f64);
                let p = homogeneous_p_for_target(n, m, per_feature).map_err(|e| planning(c, e.to_string()))?;
                (Some(p), None, target, FeatureProbabilities::homogeneous(m, p)?)
            }
            Some(base) => {
                let (s, probs) = scale_profile_to_s1(n, &base, target, c)?;
                (None, Some(s), target, probs)
            }
        }
    };
    let stats = summary_stats(n, &probs, DEFAULT_T_MAX.min(n))?;
    Ok(PlannedPoint {
        c,
        vertex_count: n,
        m,
        p,
        scale,
        target,
        s1: stats.s1,
        a_n: stats.a_n,
        probabilities: Some(probs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity_solve_has_tiny_residual() {
        let cfg = ExperimentConfig::new(Theorem::Connectivity, 1000, 1000, vec![0.0], 1);
        let pt = plan_point(&cfg, 0.0).unwrap();
        let p = pt.p.unwrap();
        let rhs = 1000f64.ln() / 1000.0;
        let g = p * (1.0 - (1.0 - p).powi(999));
        assert!((g - rhs).abs() / rhs < 1e-10);
        assert!((pt.s1 - 1000.0 * 1000f64.ln()).abs() / pt.s1 < 1e-10);
    }

    #[test]
    fn perfect_matching_plans_at_double_size() {
        let cfg = ExperimentConfig::new(Theorem::PerfectMatching, 500, 1000, vec![0.5], 1);
        let pt = plan_point(&cfg, 0.5).unwrap();
        assert_eq!(pt.vertex_count, 1000);
        assert!((pt.s1 - 1000.0 * (1000f64.ln() + 0.5)).abs() / pt.s1 < 1e-9);
    }

    #[test]
    fn explicit_profile_scaling_hits_target() {
        let base: Vec<f64> = (1..=20).map(|i| 0.001 * i as f64).collect();
        let mut cfg = ExperimentConfig::new(Theorem::Connectivity, 400, 20, vec![0.0], 1);
        cfg.profile = Profile::Explicit { p: base.clone() };
        let pt = plan_point(&cfg, 1.0).unwrap();
        let target = 400.0 * (400f64.ln() + 1.0);
        assert!((pt.s1 - target).abs() / target < 1e-8);
        assert!(pt.scale.unwrap() > 0.0);
        // Monotone in the scale.
        let mut prev = 0.0;
        for s in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let v = s1_only(400, &scaled(&base, s));
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn power_law_profile_scaling_hits_target() {
        let mut cfg = ExperimentConfig::new(Theorem::Hamiltonicity, 300, 600, vec![0.0], 1);
        cfg.profile = Profile::PowerLaw { exponent: 0.7 };
        let pt = plan_point(&cfg, 2.0).unwrap();
        assert!((pt.s1 - pt.target).abs() / pt.target < 1e-8);
    }

    #[test]
    fn unattainable_targets_are_planning_errors() {
        let cfg = ExperimentConfig::new(Theorem::Connectivity, 1000, 2, vec![0.0], 1);
        let err = plan_point(&cfg, 0.0).unwrap_err();
        assert!(matches!(err, Error::Planning { c, .. } if c == 0.0), "{err:?}");
        let cfg = ExperimentConfig::new(Theorem::Connectivity, 1000, 1000, vec![-10.0], 1);
        assert!(matches!(plan_point(&cfg, -10.0), Err(Error::Planning { .. })));
        let mut cfg = ExperimentConfig::new(Theorem::Connectivity, 1000, 2, vec![0.0], 1);
        cfg.profile = Profile::Explicit { p: vec![0.1, 0.2] };
        assert!(matches!(plan_point(&cfg, 0.0), Err(Error::Planning { .. })));
    }

    #[test]
    fn refined_displays_solve_their_fixed_point() {
        for theorem in [Theorem::HamiltonicityRefined, Theorem::KConnectivityRefined, Theorem::MinDegreeRefined] {
            let mut cfg = ExperimentConfig::new(theorem, 1000, 2000, vec![0.0], 1);
            if theorem.uses_k() {
                cfg.k = Some(2);
            }
            let pt = plan_point(&cfg, 1.5).unwrap();
            let p = pt.p.unwrap();
            let kind = refined_kind(theorem, 2);
            let lhs = 2000.0 * edge_mass(1000, p);
            let rhs = refined_threshold_rhs(1000, p, kind).unwrap() + 1.5;
            assert!((lhs - rhs).abs() / rhs < 1e-9, "{theorem:?}");
        }
    }

    #[test]
    fn refined_k1_matches_plain_display_asymptotically() {
        // With k = 1 the min-degree display adds ln(1 + r) to ln n.
        let mut cfg = ExperimentConfig::new(Theorem::MinDegreeRefined, 2000, 4000, vec![0.0], 1);
        cfg.k = Some(1);
        let refined = plan_point(&cfg, 0.0).unwrap().p.unwrap();
        let plain =
            plan_point(&ExperimentConfig::new(Theorem::MinDegree, 2000, 4000, vec![0.0], 1), 0.0).unwrap().p.unwrap();
        assert!(refined >= plain);
    }
}

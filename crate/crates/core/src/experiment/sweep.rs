//! Seeded parallel sweeps over the `c` grid.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Theorem};
use super::plan::{plan_point, PlannedPoint};
use crate::error::{Error, Result};
use crate::generators::sample_rig_with;
use crate::properties::connectivity::{is_connected_adj, is_k_connected_adj, ConnectivityMode};
use crate::properties::hamilton::{decide, Verdict};
use crate::properties::matching::has_perfect_matching_adj;
use crate::seed::{tags, Seed};
use crate::threshold::limit_probability;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let nf = trials as f64;
    let phat = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (phat + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt();
    // Rounding can push a bound past the estimate at 0 or 1.
    Interval { lo: (center - half).clamp(0.0, phat), hi: (center + half).clamp(phat, 1.0) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub verdict: Verdict,
    pub min_degree: usize,
    /// Per-trial implication failures (connected without δ ≥ 1, ...).
    pub inconsistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub c: f64,
    pub vertex_count: usize,
    pub m: usize,
    pub p: Option<f64>,
    pub scale: Option<f64>,
    pub target: f64,
    pub s1: f64,
    pub a_n: f64,
    pub trials: usize,
    pub yes: usize,
    pub no: usize,
    pub unknown: usize,
    /// `yes / (yes + no)`; Unknowns are excluded.
    pub frequency: Option<f64>,
    pub wilson: Interval,
    pub unknown_rate: f64,
    pub predicted: Option<f64>,
    /// Fraction of trials with minimum degree at least `k`.
    pub min_degree_frequency: f64,
    pub consistency_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub summary: PointSummary,
    pub trials: Vec<TrialRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub code_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub manifest: Manifest,
    pub points: Vec<PointResult>,
    /// Set when a trial panicked; `points` then holds completed points only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

impl SweepResult {
    pub fn empty(config: ExperimentConfig) -> Self {
        SweepResult {
            manifest: Manifest { config, code_version: env!("CARGO_PKG_VERSION").into(), wall_time_ms: None },
            points: Vec::new(),
            aborted: None,
        }
    }

    pub fn trial_count(&self) -> usize {
        self.points.iter().map(|p| p.trials.len()).sum()
    }

    /// Turns an aborted sweep into an error.
    pub fn into_checked(self) -> Result<SweepResult> {
        let completed = self.trial_count();
        match self.aborted {
            None => Ok(self),
            Some(reason) => Err(Error::SweepAborted { completed, reason }),
        }
    }
}

/// Predicted limit at `c`: `f(c)` for limit laws, 0 or 1 by the sign of
/// `c` for 0/1 laws (no prediction at `c = 0`).
pub fn predicted_limit(theorem: Theorem, c: f64) -> Option<f64> {
    if theorem.has_limit_law() {
        limit_probability(c).ok()
    } else if c > 0.0 {
        Some(1.0)
    } else if c < 0.0 {
        Some(0.0)
    } else {
        None
    }
}

fn trial_seed(cfg: &ExperimentConfig, point: usize, trial: u64) -> Seed {
    Seed::new(cfg.master_seed).with_experiment(point as u64).with_trial(trial)
}

/// Samples one graph and evaluates the theorem's property on it.
fn run_trial(cfg: &ExperimentConfig, point: &PlannedPoint, point_index: usize, trial: u64) -> TrialRecord {
    let start = cfg.record_timing.then(Instant::now);
    let seed = trial_seed(cfg, point_index, trial);
    let n = point.vertex_count;
    let rig = sample_rig_with(n, point.probabilities(), &mut seed.with_tag(tags::FEATURES).rng());
    let adj = rig.project().adjacency();
    let min_degree = adj.iter().map(Vec::len).min().unwrap_or(0);
    let k = cfg.k_value() as usize;
    let yes_no = |b: bool| if b { Verdict::Yes } else { Verdict::No };
    let (verdict, inconsistent) = match cfg.theorem {
        Theorem::Connectivity => {
            let v = is_connected_adj(&adj);
            (yes_no(v), v && min_degree < 1)
        }
        Theorem::KConnectivity | Theorem::KConnectivityRefined => {
            let v = is_k_connected_adj(&adj, k, ConnectivityMode::Vertex);
            (yes_no(v), v && min_degree < k)
        }
        Theorem::PerfectMatching => {
            let v = has_perfect_matching_adj(&adj);
            (yes_no(v), v && min_degree < 1)
        }
        Theorem::Hamiltonicity | Theorem::HamiltonicityRefined => {
            let r = decide(&adj, cfg.hc_budget, &mut seed.with_tag(tags::HAMILTON).rng());
            let bad = r.verdict == Verdict::Yes
                && (min_degree < 2 || !is_k_connected_adj(&adj, 2, ConnectivityMode::Vertex));
            (r.verdict, bad)
        }
        Theorem::MinDegree => (yes_no(min_degree >= 1), false),
        Theorem::MinDegreeRefined => (yes_no(min_degree >= k), false),
    };
    TrialRecord {
        trial,
        seed: seed.derive(),
        verdict,
        min_degree,
        inconsistent,
        elapsed_ms: start.map(|s| s.elapsed().as_millis() as u64),
    }
}

fn summarize(cfg: &ExperimentConfig, point: &PlannedPoint, trials: &[TrialRecord]) -> PointSummary {
    let count = |v: Verdict| trials.iter().filter(|t| t.verdict == v).count();
    let (yes, no, unknown) = (count(Verdict::Yes), count(Verdict::No), count(Verdict::Unknown));
    let decided = yes + no;
    let k = match cfg.theorem {
        Theorem::Hamiltonicity | Theorem::HamiltonicityRefined => 2,
        _ => cfg.k_value() as usize,
    };
    let total = trials.len();
    PointSummary {
        c: point.c,
        vertex_count: point.vertex_count,
        m: point.m,
        p: point.p,
        scale: point.scale,
        target: point.target,
        s1: point.s1,
        a_n: point.a_n,
        trials: total,
        yes,
        no,
        unknown,
        frequency: (decided > 0).then(|| yes as f64 / decided as f64),
        wilson: wilson_interval(yes, decided, Z_95),
        unknown_rate: if total > 0 { unknown as f64 / total as f64 } else { 0.0 },
        predicted: predicted_limit(cfg.theorem, point.c),
        min_degree_frequency: if total > 0 {
            trials.iter().filter(|t| t.min_degree >= k).count() as f64 / total as f64
        } else {
            0.0
        },
        consistency_violations: trials.iter().filter(|t| t.inconsistent).count(),
    }
}

/// Plans every grid point (failing fast), then runs all trials. Output is
/// identical for any thread count.
pub fn run_sweep(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<SweepResult> {
    run_sweep_with(cfg, threads, run_trial)
}

pub(crate) fn run_sweep_with<F>(cfg: &ExperimentConfig, threads: Option<usize>, trial_fn: F) -> Result<SweepResult>
where
    F: Fn(&ExperimentConfig, &PlannedPoint, usize, u64) -> TrialRecord + Sync,
{
    cfg.validate()?;
    let started = Instant::now();
    let planned: Vec<PlannedPoint> = cfg.c_grid.iter().map(|&c| plan_point(cfg, c)).collect::<Result<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::validation(format!("thread pool: {e}")))?;
    let mut result = SweepResult::empty(cfg.resolved());
    for (index, point) in planned.iter().enumerate() {
        let outcomes: Vec<std::result::Result<TrialRecord, String>> = pool.install(|| {
            (0..cfg.trials_per_point as u64)
                .into_par_iter()
                .map(|t| {
                    catch_unwind(AssertUnwindSafe(|| trial_fn(cfg, point, index, t))).map_err(|payload| {
                        payload
                            .downcast_ref::<&str>()
                            .map(|s| s.to_string())
                            .or_else(|| payload.downcast_ref::<String>().cloned())
                            .unwrap_or_else(|| "trial panicked".into())
                    })
                })
                .collect()
        });
        if let Some((t, reason)) = outcomes.iter().enumerate().find_map(|(t, o)| o.as_ref().err().map(|r| (t, r))) {
            result.aborted = Some(format!("c = {}, trial {t}: {reason}", point.c));
            break;
        }
        let trials: Vec<TrialRecord> = outcomes.into_iter().map(|o| o.expect("checked above")).collect();
        result.points.push(PointResult { summary: summarize(cfg, point, &trials), trials });
    }
    if cfg.record_timing {
        result.manifest.wall_time_ms = Some(started.elapsed().as_millis() as u64);
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub c: f64,
    pub empirical: Option<f64>,
    pub predicted: Option<f64>,
    pub gap: Option<f64>,
    pub interval: Interval,
    /// Interval contains the prediction.
    pub covered: Option<bool>,
    /// Prediction exists and lies outside the interval.
    pub flagged: bool,
    pub unknown_rate: f64,
    pub a_n: f64,
    /// Status of the `a_n → a ∈ (0, 1]` hypothesis where a lower bound uses it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_n_note: Option<String>,
}

/// Per-point comparison of empirical frequencies with the limit.
pub fn compare_to_limit(result: &SweepResult) -> Vec<ComparisonRow> {
    let theorem = result.manifest.config.theorem;
    result
        .points
        .iter()
        .map(|p| {
            let s = &p.summary;
            let covered = s.predicted.map(|f| s.wilson.lo <= f && f <= s.wilson.hi);
            let a_n_note = (theorem.needs_a_n_hypothesis() && s.c < 0.0).then(|| {
                let ln_n = (s.vertex_count as f64).ln();
                if s.a_n * ln_n >= 1.0 {
                    format!("a_n = {:.4} bounded away from 0", s.a_n)
                } else {
                    format!("a_n = {:.4} near 0; lower bound not claimed", s.a_n)
                }
            });
            ComparisonRow {
                c: s.c,
                empirical: s.frequency,
                predicted: s.predicted,
                gap: s.frequency.zip(s.predicted).map(|(e, f)| (e - f).abs()),
                interval: s.wilson,
                covered,
                flagged: covered == Some(false),
                unknown_rate: s.unknown_rate,
                a_n: s.a_n,
                a_n_note,
            }
        })
        .collect()
}

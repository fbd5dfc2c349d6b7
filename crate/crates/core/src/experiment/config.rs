//! Sweep configuration (JSON).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::properties::hamilton::DEFAULT_BUDGET;
use crate::threshold::default_omega;

/// Which limit statement a sweep exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// Connectivity, `S1 = n (ln n + c)`, limit `f(c)`.
    #[serde(rename = "conn-Thm2i")]
    Connectivity,
    /// k-connectivity, `S1 = n (ln n + (k-1) ln ln n + c)`, 0/1 law.
    #[serde(rename = "kconn-Thm2ii")]
    KConnectivity,
    /// Perfect matching on `2n` vertices, `S1 = 2n (ln 2n + c)`, limit `f(c)`.
    #[serde(rename = "pm-Thm3")]
    PerfectMatching,
    /// Hamiltonicity, `S1 = n (ln n + ln ln n + c)`, 0/1 law.
    #[serde(rename = "hc-Thm4")]
    Hamiltonicity,
    /// Hamiltonicity, refined homogeneous display, 0/1 law.
    #[serde(rename = "hc-Thm5")]
    HamiltonicityRefined,
    /// k-connectivity, refined homogeneous display, 0/1 law.
    #[serde(rename = "kconn-Thm6")]
    KConnectivityRefined,
    /// Minimum degree at least 1, `S1 = n (ln n + c)`, limit `f(c)`.
    #[serde(rename = "mindeg-Lemma8")]
    MinDegree,
    /// Minimum degree at least k, refined homogeneous display, 0/1 law.
    #[serde(rename = "mindeg-Lemma10")]
    MinDegreeRefined,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::Connectivity,
        Theorem::KConnectivity,
        Theorem::PerfectMatching,
        Theorem::Hamiltonicity,
        Theorem::HamiltonicityRefined,
        Theorem::KConnectivityRefined,
        Theorem::MinDegree,
        Theorem::MinDegreeRefined,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Theorem::Connectivity => "conn-Thm2i",
            Theorem::KConnectivity => "kconn-Thm2ii",
            Theorem::PerfectMatching => "pm-Thm3",
            Theorem::Hamiltonicity => "hc-Thm4",
            Theorem::HamiltonicityRefined => "hc-Thm5",
            Theorem::KConnectivityRefined => "kconn-Thm6",
            Theorem::MinDegree => "mindeg-Lemma8",
            Theorem::MinDegreeRefined => "mindeg-Lemma10",
        }
    }

    /// Whether the statement takes a `k` parameter.
    pub fn uses_k(&self) -> bool {
        matches!(self, Theorem::KConnectivity | Theorem::KConnectivityRefined | Theorem::MinDegreeRefined)
    }

    /// Limit is `f(c)` rather than a 0/1 law.
    pub fn has_limit_law(&self) -> bool {
        matches!(self, Theorem::Connectivity | Theorem::PerfectMatching | Theorem::MinDegree)
    }

    /// Target is read off a refined homogeneous display.
    pub fn is_refined(&self) -> bool {
        matches!(self, Theorem::HamiltonicityRefined | Theorem::KConnectivityRefined | Theorem::MinDegreeRefined)
    }

    pub fn is_hamiltonicity(&self) -> bool {
        matches!(self, Theorem::Hamiltonicity | Theorem::HamiltonicityRefined)
    }

    /// Lower-bound halves that assume `a_n → a ∈ (0, 1]`.
    pub fn needs_a_n_hypothesis(&self) -> bool {
        matches!(self, Theorem::KConnectivity | Theorem::Hamiltonicity)
    }
}

/// How feature probabilities are chosen at each grid point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// All `p_i` equal, solved from the target.
    #[default]
    Homogeneous,
    /// A fixed shape `p̄`, scaled by a scalar found by bisection.
    Explicit { p: Vec<f64> },
    /// Shape `p_i ∝ i^(-exponent)`, scaled like `Explicit`.
    PowerLaw { exponent: f64 },
}

fn default_trials() -> usize {
    100
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub theorem: Theorem,
    #[serde(default)]
    pub k: Option<u32>,
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub profile: Profile,
    pub c_grid: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials_per_point: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default = "default_budget")]
    pub hc_budget: u64,
    /// Wall-clock fields make outputs non-reproducible; off by default.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(theorem: Theorem, n: usize, m: usize, c_grid: Vec<f64>, trials_per_point: usize) -> Self {
        ExperimentConfig {
            theorem,
            k: None,
            n,
            m,
            profile: Profile::Homogeneous,
            c_grid,
            trials_per_point,
            master_seed: 0,
            omega: None,
            hc_budget: DEFAULT_BUDGET,
            record_timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Vertex count of the sampled graphs (`2n` for perfect matchings).
    pub fn vertex_count(&self) -> usize {
        match self.theorem {
            Theorem::PerfectMatching => 2 * self.n,
            _ => self.n,
        }
    }

    /// `k`, defaulting to 1 for statements without one.
    pub fn k_value(&self) -> u32 {
        self.k.unwrap_or(1)
    }

    pub fn omega_value(&self) -> f64 {
        self.omega.unwrap_or_else(|| default_omega(self.vertex_count()))
    }

    /// The config with every default made explicit.
    pub fn resolved(&self) -> ExperimentConfig {
        let mut out = self.clone();
        if out.theorem.uses_k() {
            out.k = Some(self.k_value());
        }
        out.omega = Some(self.omega_value());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::validation(msg));
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if self.c_grid.is_empty() {
            return bad("c_grid must not be empty".into());
        }
        if self.c_grid.iter().any(|c| !c.is_finite()) {
            return bad("c_grid values must be finite".into());
        }
        if self.c_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("c_grid must be strictly increasing".into());
        }
        if self.trials_per_point == 0 {
            return bad("trials_per_point must be at least 1".into());
        }
        if self.hc_budget == 0 {
            return bad("hc_budget must be at least 1".into());
        }
        if let Some(w) = self.omega {
            if !(w.is_finite() && w > 0.0) {
                return bad(format!("omega must be positive, got {w}"));
            }
        }
        match (self.theorem.uses_k(), self.k) {
            (true, Some(0)) => return bad("k must be at least 1".into()),
            (false, Some(k)) if k != 1 => {
                return bad(format!("{} takes no k (got {k})", self.theorem.tag()));
            }
            _ => {}
        }
        match &self.profile {
            Profile::Homogeneous => {}
            Profile::Explicit { p } => {
                if p.len() != self.m {
                    return bad(format!("explicit profile has {} entries, m = {}", p.len(), self.m));
                }
                if p.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                    return bad("explicit profile entries must lie in (0, 1)".into());
                }
            }
            Profile::PowerLaw { exponent } => {
                if !(exponent.is_finite() && *exponent >= 0.0) {
                    return bad(format!("power-law exponent must be non-negative, got {exponent}"));
                }
            }
        }
        if self.theorem.is_refined() && self.profile != Profile::Homogeneous {
            return bad(format!("{} is defined for homogeneous profiles only", self.theorem.tag()));
        }
        Ok(())
    }
}

//! Deterministic seed derivation.
//!
//! Every random stream in the laboratory is keyed by a master seed plus
//! three labels (experiment, trial, sub-stream tag). The derived 64-bit
//! sub-seed feeds a ChaCha8 generator, whose output is fixed across
//! platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The concrete generator used everywhere.
pub type LabRng = ChaCha8Rng;

/// Sub-stream tags. One per independent source of randomness in a trial.
pub mod tags {
    pub const FEATURES: u64 = 1;
    pub const DRAWS_ARITY2: u64 = 2;
    pub const DRAWS_ARITY3: u64 = 3;
    pub const PADDING: u64 = 4;
    pub const POISSON_COUNTS: u64 = 5;
    pub const COUPONS: u64 = 6;
    pub const HAMILTON: u64 = 7;
    pub const HYPERGRAPH: u64 = 8;
    pub const AUDIT: u64 = 9;
    pub const POISSON_SIDE: u64 = 10;
    pub const INDEPENDENT_SIDE: u64 = 11;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub experiment: u64,
    pub trial: u64,
    pub tag: u64,
}

impl Seed {
    pub fn new(master: u64) -> Self {
        Seed {
            master,
            ..Default::default()
        }
    }

    pub fn with_experiment(self, experiment: u64) -> Self {
        Seed { experiment, ..self }
    }

    pub fn with_trial(self, trial: u64) -> Self {
        Seed { trial, ..self }
    }

    pub fn with_tag(self, tag: u64) -> Self {
        Seed { tag, ..self }
    }

    /// Pure function of all four fields.
    pub fn derive(&self) -> u64 {
        let mut h = mix64(self.master ^ 0x6a09_e667_f3bc_c908);
        h = mix64(h ^ self.experiment.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        h = mix64(h ^ self.trial.wrapping_mul(0xbf58_476d_1ce4_e5b9));
        mix64(h ^ self.tag.wrapping_mul(0x94d0_49bb_1331_11eb))
    }

    pub fn rng(&self) -> LabRng {
        LabRng::seed_from_u64(self.derive())
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

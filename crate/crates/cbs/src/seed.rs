//! Deterministic stream seeding for ensemble runs.
//!
//! Every realization of disorder draws from its own counter-derived RNG
//! stream, so realization `i` produces bitwise the same disorder no matter
//! which worker executes it or in which order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// SplitMix64 finalizer; decorrelates consecutive counters.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Master seed plus counter-based derivation of per-realization streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    master_seed: u64,
}

impl SeedPlan {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// 64-bit seed of stream `i`.
    pub fn stream_seed(&self, i: u64) -> u64 {
        splitmix64(splitmix64(self.master_seed) ^ splitmix64(i.wrapping_mul(0xA076_1D64_78BD_642F)))
    }

    /// RNG for realization `i`.
    pub fn stream(&self, i: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.stream_seed(i))
    }

    /// Derive an independent sub-plan for a named stage, so different stages
    /// of one run never share streams.
    pub fn stage(&self, label: &str) -> SeedPlan {
        let mut h = splitmix64(self.master_seed ^ 0x5851_F42D_4C95_7F2D);
        for byte in label.as_bytes() {
            h = splitmix64(h ^ u64::from(*byte));
        }
        SeedPlan { master_seed: h }
    }
}

//! Deterministic splittable seed streams.
//!
//! Every parallel task derives its generator from `(master seed, task index)`
//! through [`SeedStream::split`], so results never depend on scheduling or
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream for task `index`. Distinct indices give independent
    /// streams; the mapping is a fixed bijective mix so it is stable across
    /// platforms and releases.
    pub fn split(&self, index: u64) -> SeedStream {
        let salt = mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15));
        SeedStream {
            seed: mix64(self.seed ^ salt),
        }
    }

    /// Named child stream, for sub-experiments that must not collide with
    /// numbered tasks.
    pub fn fork(&self, label: &str) -> SeedStream {
        let h = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        SeedStream {
            seed: mix64(self.seed.rotate_left(17) ^ mix64(h)),
        }
    }

    pub fn rng(&self) -> StreamRng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

// splitmix64 finalizer
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

//! Seeded random stream shared by deployment and LEACH election.
//!
//! Backed by ChaCha8 (value-stable across platforms and crate releases).
//! Floats are derived from the raw 64-bit output here rather than through a
//! distribution crate, so the mapping from seed to trajectory never depends
//! on an external sampling implementation.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[0, upper]`.
    pub fn uniform_to(&mut self, upper: f64) -> f64 {
        self.uniform() * upper
    }
}

//! Seeded randomness for mid-circuit measurement.
//!
//! The generator is ChaCha8 as implemented by `rand_chacha` 0.3, seeded through
//! `SeedableRng::seed_from_u64` (rand_core 0.6: the 64-bit seed is expanded to
//! 32 key bytes with PCG32, stream 0). Each draw consumes one `next_u64` word
//! `w` and maps it to `u = (w >> 11) * 2^-53`, a uniform double in `[0, 1)`.
//! Both crates guarantee value stability of that stream across platforms and
//! patch releases, so a seed pins every measurement outcome.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    draws: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState {
            seed,
            draws: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of values drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Next uniform double in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.draws += 1;
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

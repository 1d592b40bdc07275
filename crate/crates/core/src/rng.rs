//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 generator (a counter-based cipher RNG) seeded via
//! `rand_core`'s `seed_from_u64` and switched to a fixed stream id, so one run
//! seed yields independent environment and learner sequences. Conversions to
//! floats and integer ranges are spelled out here instead of delegated, which
//! keeps sequences stable across `rand` releases:
//!
//! - `next_f64`: the top 53 bits of a `u64` times `2^-53`, in `[0, 1)`.
//! - `uniform(lo, hi)`: `lo + (hi - lo) * next_f64()`.
//! - `int_inclusive(lo, hi)`: `lo + floor(next_f64() * (hi - lo + 1))`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream id for environment draws (contexts, noise).
pub const ENV_STREAM: u64 = 0;
/// Stream id for the learner's own randomization.
pub const LEARNER_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRng(ChaCha8Rng);

impl SlotRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SlotRng(inner)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn int_inclusive(&mut self, lo: u8, hi: u8) -> u8 {
        let span = (hi - lo) as f64 + 1.0;
        let offset = (self.next_f64() * span).floor() as u8;
        lo + offset.min(hi - lo)
    }
}

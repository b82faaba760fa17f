//! Portable seeded random streams.
//!
//! All sampling goes through xoshiro256++ seeded by SplitMix64 expansion of a
//! single `u64`. Independent substreams are obtained with the generator's
//! `jump()` (2^128 steps apart), so stream `k` of seed `s` is the same on
//! every platform. Uniforms use the top 53 bits; normals are produced by
//! inverting the CDF.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::normal;

#[derive(Debug, Clone)]
pub struct Stream {
    inner: Xoshiro256PlusPlus,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// The `index`-th non-overlapping substream of `seed`.
    pub fn substream(seed: u64, index: usize) -> Self {
        let mut inner = Xoshiro256PlusPlus::seed_from_u64(seed);
        for _ in 0..index {
            inner.jump();
        }
        Stream { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn std_normal(&mut self) -> f64 {
        normal::quantile(self.uniform())
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.std_normal()
    }
}

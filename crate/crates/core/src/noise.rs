//! Counter-based Gaussian noise.
//!
//! Draw `(seed, axis, step)` is a pure function of its key: the key is hashed
//! with the SplitMix64 finalizer into two uniforms, and Box–Muller turns them
//! into one standard normal. No state is carried, so realizations are
//! reproducible on every platform and independent of evaluation order.
//!
//! Ensembles derive per-realization seeds with [`split_seed`].

#[allow(unused_imports)]
use num_traits::Float;

use crate::consts::TAU;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `(0, 1]` from the top 53 bits.
#[inline]
fn unit(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed of realization `index` of an ensemble with master seed `master`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    mix(master ^ mix(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseStream {
    pub seed: u64,
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Standard normal for `(axis, step)`.
    pub fn normal(&self, axis: u32, step: u64) -> f64 {
        let key = mix(self.seed.wrapping_add(GOLDEN.wrapping_mul(u64::from(axis) + 1)));
        let h1 = mix(key ^ step.wrapping_mul(0xD6E8_FEB8_6659_FD93));
        let h2 = mix(h1 ^ GOLDEN);
        let (u1, u2) = (unit(h1), unit(h2));
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }

    /// The two draws used by one step of the conditional dynamics.
    pub fn pair(&self, step: u64) -> [f64; 2] {
        [self.normal(0, step), self.normal(1, step)]
    }
}

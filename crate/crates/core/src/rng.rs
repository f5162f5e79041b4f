//! Counter-based random words: every draw is a pure function of
//! `(seed, trial, index, lane)`.
//!
//! The generator is a SplitMix64 counter hash and is frozen; changing any
//! constant below changes every Monte Carlo result in the crate.
//!
//! ```text
//! mix(z)   = z ^= z >> 30; z *= 0xbf58476d1ce4e5b9;
//!            z ^= z >> 27; z *= 0x94d049bb133111eb; z ^ (z >> 31)
//! key      = mix(mix(seed) ^ (trial + 1) * 0x9e3779b97f4a7c15)
//! word     = mix(key ^ mix((2 * index + lane + 1) * 0xd1b54a32d192ed03))
//! ```
//!
//! All arithmetic wraps modulo 2^64. Parallel trials therefore cannot
//! perturb one another, whatever the thread count or evaluation order.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const INDEX_MUL: u64 = 0xd1b5_4a32_d192_ed03;

/// The SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One independent stream, identified by `(seed, trial)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stream {
    key: u64,
}

impl Stream {
    pub fn new(seed: u64, trial: u64) -> Self {
        let key = mix64(mix64(seed) ^ trial.wrapping_add(1).wrapping_mul(GOLDEN));
        Self { key }
    }

    /// Raw 64-bit word. `lane` is 0 or 1; two lanes per index feed
    /// transforms that need a pair of uniforms.
    #[inline]
    pub fn word(&self, index: u64, lane: u64) -> u64 {
        let counter = index.wrapping_mul(2).wrapping_add(lane).wrapping_add(1);
        mix64(self.key ^ mix64(counter.wrapping_mul(INDEX_MUL)))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&self, index: u64, lane: u64) -> f64 {
        (self.word(index, lane) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`, safe to take a logarithm of.
    #[inline]
    pub fn uniform_open0(&self, index: u64, lane: u64) -> f64 {
        ((self.word(index, lane) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `±1` from the top bit.
    #[inline]
    pub fn sign(&self, index: u64) -> f64 {
        if self.word(index, 0) >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal via the cosine branch of Box–Muller.
    #[inline]
    pub fn normal(&self, index: u64) -> f64 {
        let u1 = self.uniform_open0(index, 0);
        let u2 = self.uniform(index, 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

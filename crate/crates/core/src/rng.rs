//! Deterministic seeded randomness with labelled substreams.
//!
//! Every stream is identified by a 64-bit key. A child stream's key is
//! derived from its parent's key and a label with [`derive_key`], so the
//! randomness used by any trial or carrier depends only on the master seed
//! and the path of labels leading to it, never on scheduling order.
//!
//! The mixer is the SplitMix64 finalizer:
//!
//! ```text
//! mix64(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!            z ^= z >> 27; z *= 0x94D049BB133111EB;
//!            z ^ (z >> 31)
//! derive_key(parent, label) = mix64((parent + GOLDEN_GAMMA) ^ mix64(label ^ LABEL_SALT))
//! ```
//!
//! All arithmetic is wrapping on `u64`. The generator behind a key is
//! ChaCha8 seeded with the 32 bytes `mix64(key + i * GOLDEN_GAMMA)` for
//! `i = 1..=4`, each little-endian.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const LABEL_SALT: u64 = 0xD6E8_FEB8_6659_FD93;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the child stream `label` under `parent`. Not symmetric in its
/// arguments.
#[inline]
pub fn derive_key(parent: u64, label: u64) -> u64 {
    mix64(parent.wrapping_add(GOLDEN_GAMMA) ^ mix64(label ^ LABEL_SALT))
}

/// FNV-1a over a string, for turning textual labels into stream labels.
pub fn text_label(text: &str) -> u64 {
    text.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// A reproducible random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Root stream for a master seed.
    pub fn new(seed: u64) -> Self {
        Self::from_key(mix64(seed))
    }

    fn from_key(key: u64) -> Self {
        let mut bytes = [0u8; 32];
        for (i, chunk) in bytes.chunks_exact_mut(8).enumerate() {
            let word = mix64(key.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN_GAMMA)));
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        Self {
            key,
            rng: ChaCha8Rng::from_seed(bytes),
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream. Does not consume randomness from `self`.
    pub fn substream(&self, label: u64) -> Self {
        Self::from_key(derive_key(self.key, label))
    }

    /// Child stream addressed by a path of labels.
    pub fn substream_path(&self, labels: &[u64]) -> Self {
        let key = labels.iter().fold(self.key, |k, &l| derive_key(k, l));
        Self::from_key(key)
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// `true` with probability `p` (clamped to `[0, 1]`). `p = 0` never fires
    /// and `p = 1` always does.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, stream, index)`. The ChaCha8 block
//! function is a keyed counter mode cipher, so seeking to an index is O(1)
//! and a value never depends on how many other values were drawn before it.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Sequential reader over one counter-addressed stream of `u64` words.
#[derive(Clone, Debug)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// The `index`-th `u64` of stream `(seed, stream)`, computed in isolation.
    pub fn word_at(seed: u64, stream: u64, index: u64) -> u64 {
        let mut rng = Self::new(seed, stream);
        rng.seek(index);
        rng.next_u64()
    }

    /// Position the reader so the next draw is word `index`.
    pub fn seek(&mut self, index: u64) {
        // two 32-bit ChaCha words per u64
        self.inner.set_word_pos(2 * index as u128);
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }
}

pub fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Child seed derived from a master seed and a label by SHA-256.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

//! Named, seedable random streams with hashed substreams.
//!
//! Every stream is ChaCha8 keyed by SHA-256 of `(seed, label, k, l)`, so a
//! port in another language can reproduce the exact draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator identifier recorded in configs and outputs.
pub const RNG_NAME: &str = "chacha8/v1";

pub type StreamRng = ChaCha8Rng;

/// Derives the stream for `(seed, label, k, l)`.
pub fn substream(seed: u64, label: &str, k: u64, l: u64) -> StreamRng {
    let mut h = Sha256::new();
    h.update(RNG_NAME.as_bytes());
    h.update([0u8]);
    h.update(seed.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(k.to_le_bytes());
    h.update(l.to_le_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// The top-level stream of a run.
pub fn stream(seed: u64, label: &str) -> StreamRng {
    substream(seed, label, 0, 0)
}

//! The single source of randomness used across the crate.
//!
//! All sampling and splitting go through [`seeded_shuffle`], a Fisher–Yates
//! shuffle driven by ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `SeedableRng::seed_from_u64`. Index draws use rejection sampling on raw
//! `next_u64` output so the permutation for a given seed never depends on
//! the `rand` distribution code.
//!
//! Per-group seeds are derived with [`derive_seed`]: the first eight bytes
//! (little-endian) of `SHA-256(seed_le_bytes || key_utf8)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives an independent stream seed from a base seed and a string key.
pub fn derive_seed(seed: u64, key: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(key.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Uniform integer in `[0, bound)`.
fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let limit = (u64::MAX / bound) * bound;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % bound;
        }
    }
}

/// Shuffles `items` in place with Fisher–Yates.
pub fn seeded_shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..items.len()).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

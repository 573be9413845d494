//! Deterministic seed derivation.
//!
//! Every randomized stage draws from its own ChaCha8 stream whose seed is
//! derived from the run's master seed plus a stage label and index. Streams
//! are therefore independent of each other and of iteration order, and a
//! rerun with the same master seed reproduces every draw bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; decorrelates nearby inputs into well-mixed outputs.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed, a stage label, and an index.
///
/// The label is folded in bytewise so distinct stages get unrelated
/// streams even at the same index.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut state = splitmix64(master);
    for &byte in label.as_bytes() {
        state = splitmix64(state ^ u64::from(byte));
    }
    splitmix64(state ^ index)
}

/// ChaCha8 stream for one derived stage.
pub fn rng_for(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label, index))
}

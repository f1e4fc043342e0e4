//! Seeded, splittable random streams.
//!
//! Every stochastic component draws from a [`SimRng`] obtained through
//! [`seeded_rng`] or [`split`]. Splitting mixes a textual label into the parent
//! seed, so an entity's stream only depends on `(seed, label)` and never on the
//! order in which other entities consumed randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Deterministic stream for `seed`.
pub fn seeded_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Child seed for the stream labelled `label` under `seed`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    splitmix64(seed ^ splitmix64(fnv1a(label.as_bytes())))
}

/// Independent child stream labelled `label`.
pub fn split(seed: u64, label: &str) -> SimRng {
    seeded_rng(derive_seed(seed, label))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

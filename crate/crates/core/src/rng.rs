//! Seeded random streams.
//!
//! Every trial gets its own stream derived from a 64-bit master seed as
//! `master ^ splitmix64(trial)`; there is no global RNG state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// The SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn substream_seed(master: u64, trial: u64) -> u64 {
    master ^ splitmix64(trial)
}

pub fn substream(master: u64, trial: u64) -> TrialRng {
    TrialRng::seed_from_u64(substream_seed(master, trial))
}

pub fn from_seed(seed: u64) -> TrialRng {
    TrialRng::seed_from_u64(seed)
}

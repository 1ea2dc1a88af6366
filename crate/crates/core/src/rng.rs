//! Per-trial random streams.
//!
//! Every trial owns one ChaCha8 stream seeded from a 64-bit avalanche mix of
//! `(master_seed, trial)`. ChaCha output is specified independently of the
//! host, so a given pair yields the same draws on every platform.
//!
//! Within a round the stream is consumed in a fixed order: the action
//! perturbation, then the environment's loss draws, then the resampling
//! perturbations (with the CGR `theta` draws interleaved per outer iteration).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RngStream = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed word for `(master_seed, trial)`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    mix64(mix64(master_seed.wrapping_add(GOLDEN_GAMMA)) ^ trial.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))
}

pub fn derive_trial_rng(master_seed: u64, trial: u64) -> RngStream {
    ChaCha8Rng::seed_from_u64(trial_seed(master_seed, trial))
}

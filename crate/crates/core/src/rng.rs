//! Reproducible per-trial random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of a run keyed by `base`. Streams for distinct
/// trials do not depend on how trials are scheduled.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    mix64(mix64(base) ^ trial.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn trial_rng(base: u64, trial: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(trial_seed(base, trial))
}

//! Deterministic per-round random streams.
//!
//! Every protocol round draws from its own ChaCha stream keyed by a base seed
//! and the round index, so results do not depend on how rounds are scheduled
//! across worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn round_rng(base_seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(round);
    rng
}

/// Run `count` independent rounds, in parallel when a rayon pool is
/// available, returning results in round order.
pub fn map_rounds<T, F>(base_seed: u64, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|round| {
            let mut rng = round_rng(base_seed, round);
            f(round, &mut rng)
        })
        .collect()
}

/// Fallible variant of [`map_rounds`]; the first error (in round order) wins.
pub fn try_map_rounds<T, E, F>(base_seed: u64, count: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T, E> + Sync,
{
    map_rounds(base_seed, count, f).into_iter().collect()
}

/// Draw a base seed for [`map_rounds`] from a caller-supplied generator.
pub fn derive_seed<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    rng.random()
}

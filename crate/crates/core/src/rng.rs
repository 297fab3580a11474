//! Seeded randomness.
//!
//! Every random draw in the crate comes from ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`, which expands the 64-bit seed with PCG32 as
//! documented by `rand_core`. The ChaCha8 stream is value-stable across
//! platforms, so a seed pins a corpus everywhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type GameRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> GameRng {
    ChaCha8Rng::seed_from_u64(seed)
}

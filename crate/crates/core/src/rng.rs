//! Seeded random streams for the simulators.
//!
//! Every independent unit of work (a traffic slot, a TCP run) gets its own
//! `Xoshiro256++` generator. Its seed is derived from the run's base seed and
//! the unit's index with the SplitMix64 finaliser, so a unit's draws do not
//! depend on which thread evaluates it or in what order.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of substream `index` under `base`.
pub fn substream_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn substream(base: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(substream_seed(base, index))
}

//! Seed splitting. Every random choice in the crate draws from a ChaCha8
//! stream whose seed is `splitmix64(seed ^ splitmix64(stream))`, so
//! independent consumers of one user seed never share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn split(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(split(seed, stream))
}

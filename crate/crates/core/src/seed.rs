//! Counter-based seed derivation.
//!
//! Every random stream in a run hangs off the master seed through [`child`],
//! so any candidate, lifetime or episode can be regenerated independently of
//! evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream labels used when splitting a lifetime seed.
pub mod stream {
    pub const ADJACENCY: u64 = 0x41444a;
    pub const SYNAPSES: u64 = 0x53594e;
    pub const EPISODES: u64 = 0x455053;
    pub const PERMUTATION: u64 = 0x505245;
    pub const SAMPLING: u64 = 0x534d50;
    pub const ENVIRONMENT: u64 = 0x454e56;
    pub const REPEAT: u64 = 0x524550;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the `index`-th child seed of `parent`.
pub fn child(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_mul(0xd1b5_4a32_d192_ed03)))
}

/// Two-level derivation: `child(child(parent, stream), index)`.
pub fn derive(parent: u64, stream: u64, index: u64) -> u64 {
    child(child(parent, stream), index)
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

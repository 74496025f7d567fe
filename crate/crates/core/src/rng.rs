//! Deterministic RNG substream derivation.
//!
//! Every random draw in a campaign comes from a stream derived from the
//! master seed and a structural path (realization index, domain tag, entity
//! indices). Streams are independent of scheduling order, so serial and
//! parallel campaign runs produce identical output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Domain tags keeping substreams for different purposes disjoint.
pub mod domain {
    pub const TOPOLOGY: u64 = 1;
    pub const SHADOWING: u64 = 2;
    pub const TRACE: u64 = 3;
    pub const FADING_BLOCK: u64 = 4;
    pub const FADING_SLOT: u64 = 5;
}

/// SplitMix64 finalizer, used to hash the stream path into a seed.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent RNG stream from the master seed and a path of
/// structural indices.
pub fn substream(master_seed: u64, path: &[u64]) -> ChaCha12Rng {
    let mut state = splitmix64(master_seed);
    for &part in path {
        state = splitmix64(state ^ splitmix64(part));
    }
    ChaCha12Rng::seed_from_u64(state)
}

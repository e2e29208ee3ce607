//! Seeded random streams.
//!
//! Every consumer of randomness gets its own ChaCha8 stream: the master seed
//! picks the key and the stream id picks one of the 2^64 independent
//! keystreams under that key.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RandomStream = ChaCha8Rng;

/// Stream used for inter-arrival gaps.
pub const ARRIVAL_STREAM: u64 = 0;
/// Stream used for per-request service times.
pub const SERVICE_STREAM: u64 = 1;
/// Stream used by the bin prediction error model.
pub const ERROR_STREAM: u64 = 2;

pub fn stream(seed: u64, id: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Derives a child seed from a master seed and an index (SplitMix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

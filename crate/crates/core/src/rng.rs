//! Deterministic seed splitting.
//!
//! Every random stream in the crate is derived from a single root seed and a
//! short list of integer tags (query index, observable, step, ...). Streams are
//! never shared, so results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix `tags` into `root`, producing a child seed.
pub fn derive_seed(root: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(root), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn stream(root: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, tags))
}

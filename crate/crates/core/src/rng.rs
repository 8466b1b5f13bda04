//! Seed derivation and per-task random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator. Work units
//! (a bootstrap resample, a simulated repetition) get their own stream keyed
//! by their index, so results do not depend on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator identity recorded in output metadata.
pub const GENERATOR: &str =
    "ChaCha8Rng (rand_chacha 0.9); seed_from_u64(seed), stream = task index";

/// Key-derivation step for child seeds, recorded in output metadata.
pub const DERIVATION: &str = "splitmix64 chain over (parent seed, path components)";

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and a path of indices.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(parent), |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Reproducible random streams.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded with
//! `seed_from_u64`. Independent substreams (bootstrap replicates) use the
//! same seed with the ChaCha stream id set to `index + 1`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng64 = ChaCha8Rng;

pub fn from_seed(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` of `seed`; stream 0 is reserved for [`from_seed`].
pub fn substream(seed: u64, index: u64) -> Rng64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

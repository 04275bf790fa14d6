//! Seeded random inputs and brute-force reference implementations used by
//! the test suites of `fti-core` and `fti-cli`.

pub mod comply;
pub mod gen;
pub mod lattice;
pub mod order;

pub use rand::Rng;
pub use rand_chacha::ChaCha8Rng;

use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

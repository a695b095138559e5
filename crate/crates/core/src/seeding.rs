//! Deterministic per-run random streams.
//!
//! Every run is driven by a ChaCha8 generator keyed by the user seed, with the
//! run index selecting an independent ChaCha stream. Two runs with the same
//! `(seed, index)` see identical draws no matter which worker executes them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64, run_index: u64) -> RunRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

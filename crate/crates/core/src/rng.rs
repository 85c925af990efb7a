//! Counter-based random streams: the generator for a given
//! `(seed, sample, step)` triple is independent of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 32-bit words reserved per step; a step never draws more than this.
const WORDS_PER_STEP: u128 = 64;

pub fn stream(seed: u64, sample: u64, step: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng.set_word_pos(step as u128 * WORDS_PER_STEP);
    rng
}

/// Two uniforms in `[0, 1)` for one step.
pub fn step_uniforms(seed: u64, sample: u64, step: u64) -> (f64, f64) {
    let mut r = stream(seed, sample, step);
    (r.random::<f64>(), r.random::<f64>())
}

//! Reproducible uniform streams.
//!
//! Every trial of every experiment draws from its own ChaCha8 stream, keyed by
//! the master seed and addressed by the trial index through the generator's
//! 64-bit stream selector. No sequential skipping is needed to reach trial `k`,
//! so trials can be farmed out to any number of workers and still reproduce.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// Seed shared by all trials of one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MasterSeed(pub u64);

/// Anything that hands out uniforms strictly inside `(0, 1)`.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

/// Deterministic stream of uniforms for a single trial.
#[derive(Clone, Debug)]
pub struct UniformStream {
    rng: ChaCha8Rng,
    trial_index: u64,
}

/// 2^-52
const SCALE: f64 = 1.0 / 4_503_599_627_370_496.0;

/// Maps the top 52 bits of a draw to the cell midpoint `(k + 1/2) / 2^52`.
/// Both extremes, `2^-53` and `1 - 2^-53`, are exactly representable.
#[inline]
pub fn bits_to_open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * SCALE
}

impl UniformStream {
    pub fn trial_index(&self) -> u64 {
        self.trial_index
    }

    /// Raw 64-bit generator output (the pre-image of the next uniform).
    pub fn next_bits(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

impl UniformSource for UniformStream {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        bits_to_open_unit(self.rng.next_u64())
    }
}

impl<S: UniformSource + ?Sized> UniformSource for &mut S {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        (**self).next_uniform()
    }
}

/// Stream for trial `trial_index` under `seed`.
pub fn substream(seed: MasterSeed, trial_index: u64) -> UniformStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(trial_index);
    UniformStream { rng, trial_index }
}

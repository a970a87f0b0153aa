//! Deterministic random substreams.
//!
//! Every random quantity in a run is drawn from a ChaCha8 stream identified
//! by `(master seed, purpose, replication index)`. Streams never overlap, so
//! replications can be generated in any order or on any thread and still
//! reproduce bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a substream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Dickman = 0,
    LargeJumps = 1,
    Study = 2,
}

const PURPOSES: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Substreams {
    seed: u64,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, purpose: Purpose, replication: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication * PURPOSES + purpose as u64);
        rng
    }
}

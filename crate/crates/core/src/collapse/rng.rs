//! Reproducible random substreams.
//!
//! Each `(seed, stream_index)` pair selects an independent ChaCha8 keystream:
//! the key is derived from `seed` and the 64-bit ChaCha stream id is set to
//! `stream_index`. Monte Carlo run `r` of a batch uses stream `r`, so results
//! do not depend on how runs are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    /// Substream `index` of the same seed.
    pub fn substream(&self, index: u64) -> Self {
        Self::new(self.seed, index)
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

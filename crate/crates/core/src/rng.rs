//! Seeded random streams.
//!
//! Every run derives independent ChaCha streams from one 64-bit seed, one
//! per purpose, so a run's draws never depend on how runs are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type Stream = ChaCha12Rng;

/// What a stream is used for. The discriminant is the ChaCha stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Init = 0,
    Data = 1,
    Shots = 2,
    Labels = 3,
    /// Permutation behind a randomized encoding ladder.
    Ladder = 4,
}

/// Independent stream for `(seed, purpose)`.
pub fn stream(seed: u64, purpose: Purpose) -> Stream {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

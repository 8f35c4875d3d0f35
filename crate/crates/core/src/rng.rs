//! Seeded stream splitting.
//!
//! Every random draw in a run comes from a ChaCha8 generator keyed by the
//! master seed. Each (replication, consumer) pair gets its own ChaCha stream
//! id, `replication * STREAMS_PER_REPLICATION + consumer`, so replications
//! are independent of evaluation order and parallel runs reproduce serial
//! runs bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const STREAMS_PER_REPLICATION: u64 = 8;

/// Consumers of randomness within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Consumer {
    /// The pre-drawn context sequence.
    Contexts = 0,
    /// Cost schedule construction.
    Adversary = 1,
    /// Everything the learner draws: futures, actions, estimator coins.
    Learner = 2,
    /// Random policy-class generation (replication 0 only; the class is shared).
    PolicyClass = 3,
}

pub fn stream(master_seed: u64, replication: u64, consumer: Consumer) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(
        replication
            .wrapping_mul(STREAMS_PER_REPLICATION)
            .wrapping_add(consumer as u64),
    );
    rng
}

/// A generator for a sub-spec that pins its own seed.
pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

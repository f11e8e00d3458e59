//! Replicate seeding.
//!
//! Every replicate gets two independent ChaCha streams derived from the
//! master seed: one for its arrival path and one for policy randomness.
//! All policies in a replicate see the same path and the same policy stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn path_rng(master: u64, replicate: u64) -> ChaCha8Rng {
    stream(master, 2 * replicate)
}

pub fn policy_rng(master: u64, replicate: u64) -> ChaCha8Rng {
    stream(master, 2 * replicate + 1)
}

/// A stream reserved for auxiliary Monte Carlo (offline estimates).
pub fn aux_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(index);
    rng
}

fn stream(master: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(id);
    rng
}

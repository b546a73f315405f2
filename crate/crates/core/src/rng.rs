//! Counter-based random streams.
//!
//! Every random draw in a filter comes from a ChaCha8 stream keyed by
//! `(seed, purpose)` and positioned by `(t, index)`. A particle's draws at a
//! given step therefore do not depend on how work is scheduled across
//! threads, and two filters that share a purpose consume identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share keystream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Init = 1,
    Theta = 2,
    Propagate = 3,
    Perturb = 4,
    Resample = 5,
    Simulate = 6,
    Test = 7,
}

pub fn stream(seed: u64, purpose: Purpose, t: u64, index: u64) -> ChaCha8Rng {
    assert!(t < 1 << 32 && index < 1 << 32, "stream coordinates out of range");
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((t << 32) | index);
    rng
}

//! Deterministic random number generation.
//!
//! All randomized routines in this crate draw from a ChaCha12 stream keyed by
//! a caller-supplied `u64` seed, so identical seeds give identical results on
//! every platform and at any worker count. Parallel studies derive one
//! sub-seed per (scheme, replication, stream) with a SplitMix64-style mixer,
//! which keeps replications independent of execution order.

use rand_chacha::ChaCha12Rng;

/// The RNG used everywhere results must be reproducible.
pub type DetRng = ChaCha12Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed for one replication of one scheme.
///
/// `stream` separates independent random streams inside a replication
/// (e.g. data generation vs. the MCMC chain run on that data).
pub fn replication_seed(base_seed: u64, scheme_index: u64, replication: u64, stream: u64) -> u64 {
    let mut s = splitmix(base_seed);
    s = splitmix(s ^ scheme_index.wrapping_mul(0xd6e8_feb8_6659_fd93));
    s = splitmix(s ^ replication.wrapping_mul(0xa076_1d64_78bd_642f));
    splitmix(s ^ stream)
}

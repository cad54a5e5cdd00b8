//! Deterministic random-stream derivation.
//!
//! Everything stochastic in this crate takes an explicit generator seeded
//! through this module, so that any output is a pure function of a single
//! master seed. Substreams (chains, replicates, Monte-Carlo loops) are
//! derived by the documented rule in [`derive_seed`]; independent substreams
//! never share a generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer, the standard 64-bit avalanche mix.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splitting rule: substream `k` of master seed `s` is seeded by
/// `splitmix64(s XOR (k+1) * GOLDEN)` where `GOLDEN = 0x9E3779B97F4A7C15`.
///
/// The `k+1` offset keeps stream 0 distinct from the master seed itself.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// The generator used throughout: ChaCha with 8 rounds, fully reproducible
/// across platforms for a fixed seed.
pub type Rng = ChaCha8Rng;

/// Generator for the master stream of `seed`.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for substream `stream` of `master` (see [`derive_seed`]).
pub fn rng_substream(master: u64, stream: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream))
}

// Fixed stream tags used by the experiment pipeline. Purely a namespace
// convention; any caller composing substreams should draw tags from here
// or from offsets documented at the call site.
pub const STREAM_TRUTH: u64 = 0x01;
pub const STREAM_DESIGN: u64 = 0x02;
pub const STREAM_NOISE: u64 = 0x03;
pub const STREAM_MC: u64 = 0x04;
pub const STREAM_ESTIMATOR: u64 = 0x05;
pub const STREAM_CHAIN_BASE: u64 = 0x100;
pub const STREAM_REPLICATE_BASE: u64 = 0x1000;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let mut a = rng_substream(42, 0);
        let mut b = rng_substream(42, 0);
        let mut c = rng_substream(42, 1);
        let (xa, xb, xc) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn derive_seed_differs_from_master() {
        for master in [0u64, 1, 42, u64::MAX] {
            assert_ne!(derive_seed(master, 0), master);
        }
    }
}

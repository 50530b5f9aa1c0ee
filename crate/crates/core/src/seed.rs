//! Deterministic seed derivation.
//!
//! Every random stream is derived from a root seed and a fixed text label,
//! so that suites and subcommands stay reproducible independently of each
//! other and of the order in which they run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default root seed when neither `--seed` nor `PHS_SEED` is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for `label` under `root`. Stable across platforms and releases.
pub fn derive(root: u64, label: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(root ^ splitmix64(h))
}

/// Child seed for an indexed trial under `root`.
pub fn derive_indexed(root: u64, label: &str, index: u64) -> u64 {
    splitmix64(derive(root, label) ^ splitmix64(index))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

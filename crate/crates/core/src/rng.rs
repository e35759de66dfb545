//! Deterministic seed derivation.
//!
//! Every randomized stage draws from its own substream derived from the
//! 64-bit root seed and a path label such as `"layout/seed"`,
//! `"arrange/fixture/3"`, or `"trial/17"`. Substreams are independent:
//! consuming one never shifts another, so per-trial or per-lane outputs stay
//! stable when unrelated stages change.
//!
//! The derivation is fixed so another implementation can reproduce it:
//!
//! 1. `digest = FNV-1a-64(label bytes)` with offset basis
//!    `0xcbf29ce484222325` and prime `0x100000001b3`.
//! 2. `seed = splitmix64(root ^ digest)` where `splitmix64` is the standard
//!    finalizer (add `0x9e3779b97f4a7c15`, then two xor-shift-multiply
//!    rounds with `0xbf58476d1ce4e5b9` and `0x94d049bb133111eb`).
//! 3. The substream generator is ChaCha8 seeded with that 64-bit value via
//!    `seed_from_u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// SplitMix64 finalizer step.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the 64-bit seed of the substream named `label` under `root`.
pub fn substream_seed(root: u64, label: &str) -> u64 {
    splitmix64(root ^ fnv1a64(label.as_bytes()))
}

/// Substream generator for `label` under `root`.
pub fn substream(root: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(root, label))
}

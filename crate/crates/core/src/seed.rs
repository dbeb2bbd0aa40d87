//! Deterministic seed derivation.
//!
//! Every random decision in the pipeline draws from a [`rand_chacha::ChaCha8Rng`]
//! seeded through this module, so a single 64-bit experiment seed expands into
//! independent, reproducible streams: one per purpose (`"split"`, `"balance"`,
//! `"init"`, ...) and per repetition index. The derivation is a fixed integer
//! mix, so results are identical across platforms and across runs regardless
//! of thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer. Bijective, well-mixed, stable.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over the purpose label, so distinct labels map to distinct streams.
fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives the seed for stream `label` at repetition/instance `index`.
pub fn derive_seed(base: u64, label: &str, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ fnv1a(label)) ^ index.wrapping_mul(GOLDEN))
}

/// Convenience: a ChaCha8 generator for stream `(label, index)` under `base`.
pub fn stream_rng(base: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, label, index))
}

//! Seed derivation for deterministic substreams: sweep points, restarts,
//! and counting bins each get an independent stream keyed by their index,
//! so parallel execution order can never change a result.

/// Mix a master seed with a task index (SplitMix64 finalizer). The output
/// seeds one task's private RNG.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Small shared helpers.

/// SplitMix64 step: mixes a 64-bit state into a well-distributed output.
/// Used to derive independent sub-seeds and keyed uniform variates.
#[inline]
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed from a root seed and a stream label.
#[inline]
pub(crate) fn derive_seed(root: u64, label: u64) -> u64 {
    splitmix64(root ^ splitmix64(label))
}

//! Counter-based random numbers.
//!
//! Every bond label is a pure function of `(seed, orientation, global
//! position)`, so labels do not depend on sampling order or on the window
//! that happens to contain the bond.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` attached to one bond of Z^2.
///
/// `orientation` is 0 for horizontal and 1 for vertical bonds; `(x, y)` is
/// the global lower-left endpoint.
#[inline]
pub fn bond_uniform(seed: u64, orientation: u8, x: i64, y: i64) -> f64 {
    let position = (x as i32 as u32 as u64) | ((y as i32 as u32 as u64) << 32);
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ position);
    h = splitmix64(h ^ orientation as u64);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed of trial `index` in a multi-trial experiment.
#[inline]
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

//! Counter-based randomness.
//!
//! Every random quantity in the crate is a pure function of a seed and a
//! counter tuple, so results never depend on evaluation order or on how work
//! is split across threads.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a seed together with an arbitrary counter tuple.
pub fn derive_seed(seed: u64, counters: &[u64]) -> u64 {
    counters
        .iter()
        .fold(mix64(seed), |h, &c| mix64(h ^ mix64(c.wrapping_mul(GOLDEN))))
}

#[inline]
fn unit_open(word: u64) -> f64 {
    // (0, 1]: never zero, so the logarithm below is finite.
    ((word >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal sample keyed on `(seed, x, y)` via Box–Muller.
pub fn gaussian_at(seed: u64, x: i64, y: i64) -> f64 {
    let key = derive_seed(seed, &[x as u64, y as u64]);
    let u1 = unit_open(mix64(key ^ 0x5851_F42D_4C95_7F2D));
    let u2 = unit_open(mix64(key ^ 0x1405_7B7E_F767_814F));
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

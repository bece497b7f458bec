//! Low-discrepancy sampling (Halton sequences) with a seed-controlled offset.
//!
//! Stateless by design: sample `k` of a run is fully determined by
//! `(seed, k, dimension)`, which keeps every sampled certificate reproducible
//! and safe to evaluate from parallel workers in any order.

const BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Van der Corput radical inverse of `i` in the given base, in `(0, 1)`.
pub fn radical_inverse(base: u64, mut i: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    x
}

/// Component `dim` (0-based, up to 6 dimensions) of Halton sample `k` for the
/// given seed. The seed leaps the sequence to a distant offset; index 0 of the
/// unshifted sequence (the origin) is never produced.
pub fn halton(seed: u64, k: u64, dim: usize) -> f64 {
    let offset = 1 + seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) % (1 << 30);
    radical_inverse(BASES[dim], offset + k)
}

//! Deterministic parallel reductions over index ranges.
//!
//! `min`/`max` of `f64` are exact and associative (no rounding), and ties are
//! broken toward the smaller index, so the reduction result is independent of
//! rayon's work splitting. Nothing here may ever use a floating-point sum.

use rayon::prelude::*;

/// Location of an extremal value over an index range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub index: usize,
}

const EMPTY_MIN: Extremum = Extremum {
    value: f64::INFINITY,
    index: usize::MAX,
};
const EMPTY_MAX: Extremum = Extremum {
    value: f64::NEG_INFINITY,
    index: usize::MAX,
};

fn combine_min(a: Extremum, b: Extremum) -> Extremum {
    if b.value < a.value || (b.value == a.value && b.index < a.index) {
        b
    } else {
        a
    }
}

fn combine_max(a: Extremum, b: Extremum) -> Extremum {
    if b.value > a.value || (b.value == a.value && b.index < a.index) {
        b
    } else {
        a
    }
}

/// Minimum of `f(i)` for `i in 0..n`, with the smallest attaining index.
pub fn par_min(n: usize, f: impl Fn(usize) -> f64 + Sync) -> Extremum {
    (0..n)
        .into_par_iter()
        .map(|i| Extremum {
            value: f(i),
            index: i,
        })
        .reduce(|| EMPTY_MIN, combine_min)
}

/// Maximum of `f(i)` for `i in 0..n`, with the smallest attaining index.
pub fn par_max(n: usize, f: impl Fn(usize) -> f64 + Sync) -> Extremum {
    (0..n)
        .into_par_iter()
        .map(|i| Extremum {
            value: f(i),
            index: i,
        })
        .reduce(|| EMPTY_MAX, combine_max)
}

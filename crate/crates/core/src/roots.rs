//! Bracketed bisection with a doubling bracket scan.
//!
//! All root-finding in the crate goes through these two helpers: the target
//! functions are monotone near their roots, and robustness matters more than
//! iteration count.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("bracket scan from {start} found no sign change before {limit}")]
    BracketFailed { start: f64, limit: f64 },
}

/// Bisects `f` on `[lo, hi]` (which must bracket a sign change) until the
/// interval width is below `tol`. Returns the midpoint of the final interval.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64, RootError> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section minimization on `[lo, hi]` with a fixed iteration count
/// (deterministic regardless of value noise); returns the best value seen,
/// including the endpoints. 100 iterations shrink the interval by ~1e-21.
pub fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut best = f(a).min(f(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if b - a <= 0.0 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    best.min(fc).min(fd)
}

/// Scans `start, start + step, start + 2*step, ...` with the step doubling
/// each time, until `f` changes sign; returns the bracketing pair.
pub fn bracket_scan(
    f: impl Fn(f64) -> f64,
    start: f64,
    step: f64,
    limit: f64,
) -> Result<(f64, f64), RootError> {
    let f0 = f(start);
    let mut prev = start;
    let mut step = step;
    let mut x = start + step;
    while x <= limit {
        let fx = f(x);
        if fx == 0.0 || fx.signum() != f0.signum() {
            return Ok((prev, x));
        }
        prev = x;
        step *= 2.0;
        x += step;
    }
    Err(RootError::BracketFailed { start, limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn scan_then_bisect() {
        let f = |x: f64| 1.0 - x * x * x;
        let (lo, hi) = bracket_scan(f, 0.0, 0.125, 100.0).unwrap();
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        let r = bisect(f, lo, hi, 1e-13).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reports_missing_bracket() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(RootError::NoSignChange { .. })
        ));
    }
}

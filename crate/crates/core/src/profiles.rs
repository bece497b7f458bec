//! Scalar radius profiles.
//!
//! Three pieces make up the profile machinery:
//!
//! * `g(x) = exp(-1/x)` for `x > 0`, `0` otherwise — flat to infinite order at
//!   the origin; every smooth gluing below is built from quotients of `g`.
//! * The profile `S`: symmetric about `pi/2`, identically `1` on `[0, pi]`,
//!   rounded off on `[pi, pi+alpha]` by `sqrt(S) = cos(x-pi) - g(x-pi)`, and
//!   continued beyond `pi+alpha` by a concave `C^inf` extension that crosses
//!   zero at `pi+beta` with negative slope. The square root round-off makes
//!   `S` exactly `C^{1,1}` at `0` and `pi` (the second derivative jumps from
//!   `0` to about `-2`).
//! * The smoothed profiles `S_eta`: concave `C^inf` majorants obtained by
//!   integrating `S'` against a smooth step `Phi_gamma` that switches on just
//!   past `pi`, normalized so `S_eta = 1 + eta` on a neighborhood of
//!   `[0, pi]` and `S + eta/2 <= S_eta <= S + 3*eta/2` everywhere.
//!
//! The extension and the mollified integral are represented by Chebyshev
//! series fitted to closed-form integrands and antidifferentiated in
//! coefficient space, so values, first and second derivatives are mutually
//! consistent, globally smooth, and cheap to evaluate inside the certification
//! sweeps. Adaptive Simpson quadrature is kept as an independent consistency
//! oracle at build time.

use crate::cheb::ChebPair;
use crate::quad::{adaptive_simpson, QuadError};
use crate::roots::{bisect, bracket_scan, RootError};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Default round-off width; verified by [`select_alpha`].
pub const DEFAULT_ALPHA: f64 = 0.07;
/// Absolute tolerance for all profile root-finding.
pub const ROOT_TOL: f64 = 1e-12;
/// Default tolerance for the mollified-integral consistency oracle.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-11;

const GAMMA_FLOOR: f64 = 1e-6;
const CONCAVITY_SPACING: f64 = 1e-3;
const CONCAVITY_TOL: f64 = 1e-6;
const DIST_TABLE_LEN: usize = 20_001;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("alpha = {0} out of range (0, 1/(4*pi))")]
    InvalidAlpha(f64),
    #[error("alpha inequality margins not all positive: {0:?}")]
    AlphaMargins([f64; 3]),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("extension too shallow; increase extension_c (beta = {beta} >= pi/2)")]
    ExtensionTooShallow { beta: f64 },
    #[error("concavity grid check failed: second divided difference {value:e} at x = {x}")]
    ConcavityViolated { x: f64, value: f64 },
    #[error("eta = {eta} too large for factor-100 property (gamma search floor {gamma_floor:e})")]
    EtaTooLarge { eta: f64, gamma_floor: f64 },
    #[error("smoothed profile validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Root(#[from] RootError),
}

// ---------------------------------------------------------------------------
// g and the smooth step
// ---------------------------------------------------------------------------

/// `g(x) = exp(-1/x)` for `x > 0`, `0` for `x <= 0`.
#[inline]
pub fn g_eval(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `g'(x) = g(x)/x^2` for `x > 0`, `0` otherwise.
#[inline]
pub fn g_deriv(x: f64) -> f64 {
    if x > 0.0 {
        g_eval(x) / (x * x)
    } else {
        0.0
    }
}

/// `g''(x) = g(x)(1 - 2x)/x^4` for `x > 0`, `0` otherwise.
#[inline]
pub fn g_second(x: f64) -> f64 {
    if x > 0.0 {
        g_eval(x) * (1.0 - 2.0 * x) / (x * x * x * x)
    } else {
        0.0
    }
}

/// The g-quotient step `g(u) / (g(u) + g(w - u))`: smooth, non-decreasing,
/// identically `0` for `u <= 0` and `1` for `u >= w`, and equal to `1/2` at
/// the midpoint by symmetry.
///
/// Evaluated in logistic form `1 / (1 + exp(1/u - 1/(w-u)))`, which stays
/// accurate for narrow widths where `exp(-1/u)` itself would underflow.
#[inline]
pub fn g_quotient_step(u: f64, w: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= w {
        return 1.0;
    }
    let d = 1.0 / u - 1.0 / (w - u);
    if d >= 0.0 {
        let e = (-d).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + d.exp())
    }
}

/// Derivative of [`g_quotient_step`] in `u`:
/// `sigma (1 - sigma) (1/u^2 + 1/(w-u)^2)`.
#[inline]
pub fn g_quotient_step_deriv(u: f64, w: f64) -> f64 {
    if u <= 0.0 || u >= w {
        return 0.0;
    }
    let s = g_quotient_step(u, w);
    s * (1.0 - s) * (1.0 / (u * u) + 1.0 / ((w - u) * (w - u)))
}

/// Smooth step `Phi_gamma`: `0` on `(-inf, pi + gamma/4]`, `1` on
/// `[pi + 3*gamma/4, inf)`, non-decreasing and `C^inf` in between.
pub fn smooth_step_eval(gamma: f64, x: f64) -> Result<f64, ProfileError> {
    if !(gamma > 0.0) {
        return Err(ProfileError::InvalidParam(format!(
            "smooth step width gamma must be positive, got {gamma}"
        )));
    }
    Ok(g_quotient_step(x - (PI + 0.25 * gamma), 0.5 * gamma))
}

#[inline]
fn smooth_step_raw(gamma: f64, x: f64) -> f64 {
    g_quotient_step(x - (PI + 0.25 * gamma), 0.5 * gamma)
}

#[inline]
fn smooth_step_deriv_raw(gamma: f64, x: f64) -> f64 {
    g_quotient_step_deriv(x - (PI + 0.25 * gamma), 0.5 * gamma)
}

// ---------------------------------------------------------------------------
// Round-off piece F = (cos - g)^2 on [pi, pi + alpha] and a bit beyond
// ---------------------------------------------------------------------------

#[inline]
fn roundoff(t: f64) -> f64 {
    let h = t.cos() - g_eval(t);
    h * h
}

#[inline]
fn roundoff_deriv(t: f64) -> f64 {
    let h = t.cos() - g_eval(t);
    2.0 * h * (-t.sin() - g_deriv(t))
}

#[inline]
fn roundoff_second(t: f64) -> f64 {
    let h = t.cos() - g_eval(t);
    let hp = -t.sin() - g_deriv(t);
    let hpp = -t.cos() - g_second(t);
    2.0 * (hp * hp + h * hpp)
}

// ---------------------------------------------------------------------------
// select_alpha
// ---------------------------------------------------------------------------

/// Minimal slack of the three trigonometric inequalities on a symmetric grid
/// of `[-alpha, alpha]` (an even count skips `x = 0`, where all three hold
/// with equality). Order: `|x|^3 - |sin x - x|`, `|sin x| - 3/4 |x|`,
/// `2|x| - |tan x|`.
pub fn alpha_margins(alpha: f64, n: usize) -> [f64; 3] {
    let mut m = [f64::INFINITY; 3];
    for i in 0..n {
        let x = -alpha + 2.0 * alpha * i as f64 / (n - 1) as f64;
        let ax = x.abs();
        m[0] = m[0].min(ax * ax * ax - (x.sin() - x).abs());
        m[1] = m[1].min(x.sin().abs() - 0.75 * ax);
        m[2] = m[2].min(2.0 * ax - x.tan().abs());
    }
    m
}

/// Returns the round-off width `alpha = 0.07` after verifying
/// `alpha < 1/(4*pi)` and the three inequalities on a 10^5-point grid.
pub fn select_alpha() -> Result<f64, ProfileError> {
    let alpha = DEFAULT_ALPHA;
    if !(alpha > 0.0 && alpha < 1.0 / (4.0 * PI)) {
        return Err(ProfileError::InvalidAlpha(alpha));
    }
    let m = alpha_margins(alpha, 100_000);
    if m.iter().all(|&v| v > 0.0) {
        Ok(alpha)
    } else {
        Err(ProfileError::AlphaMargins(m))
    }
}

// ---------------------------------------------------------------------------
// ProfileS
// ---------------------------------------------------------------------------

/// Precomputed node of the boundary-distance table (see
/// `geometry::distance_to_omega`): disc family at angle `s` has `|z| = e^{s/2}`
/// and `w`-disc of radius `sqrt(S(s))` centered at `e^{is}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DistNode {
    pub s: f64,
    pub radius: f64,
    pub cx: f64,
    pub cy: f64,
    pub w_rad: f64,
}

/// The concave `C^{1,1}` radius profile `S`.
#[derive(Debug, Clone)]
pub struct ProfileS {
    alpha: f64,
    beta: f64,
    extension_c: f64,
    blend_width: f64,
    blend_value: ChebPair,
    blend_slope: ChebPair,
    tail_x: f64,
    tail_value: f64,
    tail_slope: f64,
    pub(crate) dist_nodes: Vec<DistNode>,
}

impl ProfileS {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Root of `S(pi + beta) = 0`, located by bisection to 1e-12.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn extension_c(&self) -> f64 {
        self.extension_c
    }

    pub fn blend_width(&self) -> f64 {
        self.blend_width
    }

    /// The profile with the verified default parameters.
    pub fn builtin() -> Result<Self, ProfileError> {
        let alpha = select_alpha()?;
        build_profile(alpha, default_extension_c(alpha), 0.5 * alpha)
    }

    /// Second-derivative prescription of the concave extension on the blend
    /// interval `[pi+alpha, pi+alpha+blend_width]`.
    #[inline]
    fn extension_second(&self, x: f64) -> f64 {
        let u = x - (PI + self.alpha);
        let sigma = g_quotient_step(u, self.blend_width);
        (1.0 - sigma) * roundoff_second(x - PI) + sigma * (-self.extension_c)
    }

    /// `S` at `u >= pi/2` (callers reflect first).
    #[inline]
    fn raw_eval(&self, u: f64) -> f64 {
        if u <= PI {
            return 1.0;
        }
        let t = u - PI;
        if t <= self.alpha {
            roundoff(t)
        } else if u <= self.tail_x {
            self.blend_value.eval(u)
        } else {
            let v = u - self.tail_x;
            self.tail_value + self.tail_slope * v - 0.5 * self.extension_c * v * v
        }
    }

    #[inline]
    fn raw_deriv(&self, u: f64) -> f64 {
        if u <= PI {
            return 0.0;
        }
        let t = u - PI;
        if t <= self.alpha {
            roundoff_deriv(t)
        } else if u <= self.tail_x {
            self.blend_slope.eval(u)
        } else {
            self.tail_slope - self.extension_c * (u - self.tail_x)
        }
    }

    #[inline]
    fn raw_second(&self, u: f64) -> f64 {
        if u <= PI {
            return 0.0;
        }
        let t = u - PI;
        if t <= self.alpha {
            roundoff_second(t)
        } else if u <= self.tail_x {
            self.extension_second(u)
        } else {
            -self.extension_c
        }
    }

    /// Reflection of `x` into `[pi/2, inf)`; `S(x) = S(pi - x)` is enforced by
    /// evaluating through `|x - pi/2|` only.
    #[inline]
    pub(crate) fn reflect(x: f64) -> f64 {
        FRAC_PI_2 + (x - FRAC_PI_2).abs()
    }

    /// `S(x)`.
    #[inline]
    pub fn s_eval(&self, x: f64) -> f64 {
        self.raw_eval(Self::reflect(x))
    }

    /// `S'(x)` (one-sided limits at the `C^{1,1}` junctions agree, so the
    /// value is unambiguous there).
    #[inline]
    pub fn s_deriv(&self, x: f64) -> f64 {
        let d = self.raw_deriv(Self::reflect(x));
        if x < FRAC_PI_2 {
            -d
        } else {
            d
        }
    }

    /// Almost-everywhere `S''(x)`; at the junctions `0` and `pi` the flat-side
    /// value (`0`) is returned.
    #[inline]
    pub fn s_second(&self, x: f64) -> f64 {
        self.raw_second(Self::reflect(x))
    }

    /// `sqrt(max(S(x), 0))` — the disc radius; clamping only ever acts within
    /// rounding of the zero crossings at `-beta` and `pi + beta`.
    #[inline]
    pub fn sqrt_s(&self, x: f64) -> f64 {
        self.s_eval(x).max(0.0).sqrt()
    }
}

/// Constructs the profile: round-off on `[pi, pi+alpha]`, blended concave
/// extension over `blend_width`, quadratic tail of curvature `-extension_c`,
/// and `beta` from bisection of `S(pi + beta) = 0`. Validates numerical
/// concavity on a spacing-1e-3 grid and the sign of `S'(pi + beta)`.
pub fn build_profile(
    alpha: f64,
    extension_c: f64,
    blend_width: f64,
) -> Result<ProfileS, ProfileError> {
    if !(alpha > 0.0 && alpha < 1.0 / (4.0 * PI)) {
        return Err(ProfileError::InvalidAlpha(alpha));
    }
    if !(extension_c > 0.0) {
        return Err(ProfileError::InvalidParam(format!(
            "extension_c must be positive, got {extension_c}"
        )));
    }
    if !(blend_width > 0.0 && blend_width <= 0.5 * alpha) {
        return Err(ProfileError::InvalidParam(format!(
            "blend_width must lie in (0, alpha/2], got {blend_width}"
        )));
    }

    let a = PI + alpha;
    let b = a + blend_width;
    // Fit S'' on the blend, integrate twice matching value and slope of the
    // round-off at pi + alpha.
    let second = |x: f64| {
        let u = x - a;
        let sigma = g_quotient_step(u, blend_width);
        (1.0 - sigma) * roundoff_second(x - PI) + sigma * (-extension_c)
    };
    let spp = ChebPair::fit(second, a, b, 192);
    let blend_slope = spp.antiderivative(roundoff_deriv(alpha));
    let blend_value = blend_slope.antiderivative(roundoff(alpha));
    let tail_value = blend_value.eval(b);
    let tail_slope = blend_slope.eval(b);

    let mut p = ProfileS {
        alpha,
        beta: f64::NAN,
        extension_c,
        blend_width,
        blend_value,
        blend_slope,
        tail_x: b,
        tail_value,
        tail_slope,
        dist_nodes: Vec::new(),
    };

    // beta: S is strictly decreasing past pi, so scan then bisect.
    let f = |u: f64| p.raw_eval(PI + u);
    let (lo, hi) = bracket_scan(f, alpha, alpha, 64.0)?;
    let beta = bisect(f, lo, hi, ROOT_TOL)?;
    if beta >= FRAC_PI_2 {
        return Err(ProfileError::ExtensionTooShallow { beta });
    }
    p.beta = beta;

    // Numerical concavity: second divided differences on a spacing-1e-3 grid.
    let lo = -beta - 1.0;
    let hi = PI + beta + 1.0;
    let n = ((hi - lo) / CONCAVITY_SPACING).ceil() as usize;
    let h = (hi - lo) / n as f64;
    for i in 1..n {
        let x = lo + i as f64 * h;
        let dd = (p.s_eval(x + h) - 2.0 * p.s_eval(x) + p.s_eval(x - h)) / (h * h);
        if dd > CONCAVITY_TOL {
            return Err(ProfileError::ConcavityViolated { x, value: dd });
        }
    }
    if !(p.s_deriv(PI + beta) < 0.0) {
        return Err(ProfileError::Validation(format!(
            "slope at pi + beta is {} (expected negative)",
            p.s_deriv(PI + beta)
        )));
    }

    // Boundary-distance table over the support [-beta, pi + beta].
    let lo = -beta;
    let hi = PI + beta;
    p.dist_nodes = (0..DIST_TABLE_LEN)
        .map(|i| {
            let s = lo + (hi - lo) * i as f64 / (DIST_TABLE_LEN - 1) as f64;
            DistNode {
                s,
                radius: (0.5 * s).exp(),
                cx: s.cos(),
                cy: s.sin(),
                w_rad: p.sqrt_s(s),
            }
        })
        .collect();

    Ok(p)
}

/// Curvature-matched extension floor `-F''(pi + alpha)` (about 2.127 for
/// `alpha = 0.07`): the blend then interpolates between nearly equal
/// curvatures, so the glued profile has no curvature feature sharper than the
/// round-off itself.
pub fn default_extension_c(alpha: f64) -> f64 {
    -roundoff_second(alpha)
}

/// `eps0 = 0.9 * min(1 - sqrt(S(pi + alpha)), g(alpha))`: below this every
/// tube radius admits the witness construction.
pub fn epsilon0(p: &ProfileS) -> f64 {
    let root = p.s_eval(PI + p.alpha()).sqrt();
    0.9 * (1.0 - root).min(g_eval(p.alpha()))
}

// ---------------------------------------------------------------------------
// SmoothedProfile
// ---------------------------------------------------------------------------

/// A smooth concave majorant `S_eta` of `S`, built as
/// `1 + eta + int_{pi/2}^{pi/2 + |x - pi/2|} S'(t) Phi_gamma(t) dt`.
#[derive(Debug, Clone)]
pub struct SmoothedProfile {
    base: ProfileS,
    eta: f64,
    gamma: f64,
    x_eta: f64,
    beta_eta: f64,
    quadrature_tol: f64,
    ramp_lo: f64,
    ramp_hi: f64,
    ramp_integral: ChebPair,
    ramp_total: f64,
    s_at_ramp_hi: f64,
}

impl SmoothedProfile {
    pub fn base(&self) -> &ProfileS {
        &self.base
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Mollifier width found by the downward search in [`build_smoothed`].
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Root of `S_eta = 1` above `pi`.
    pub fn x_eta(&self) -> f64 {
        self.x_eta
    }

    /// `S_eta(pi + beta_eta) = 0`.
    pub fn beta_eta(&self) -> f64 {
        self.beta_eta
    }

    pub fn quadrature_tol(&self) -> f64 {
        self.quadrature_tol
    }

    /// `S_eta(x)`.
    pub fn s_eta_eval(&self, x: f64) -> f64 {
        let u = ProfileS::reflect(x);
        let flat = 1.0 + self.eta;
        if u <= self.ramp_lo {
            flat
        } else if u <= self.ramp_hi {
            flat + self.ramp_integral.eval(u)
        } else {
            flat + self.ramp_total + (self.base.raw_eval(u) - self.s_at_ramp_hi)
        }
    }

    /// `S_eta'(x)`, in closed form from the integrand (`S' * Phi_gamma`
    /// composed with the reflection).
    pub fn s_eta_deriv(&self, x: f64) -> f64 {
        let u = ProfileS::reflect(x);
        if u <= self.ramp_lo {
            return 0.0;
        }
        let d = self.base.raw_deriv(u) * smooth_step_raw(self.gamma, u);
        if x < FRAC_PI_2 {
            -d
        } else {
            d
        }
    }

    /// `S_eta''(x) = S'' Phi + S' Phi'` at the reflected argument.
    pub fn s_eta_second(&self, x: f64) -> f64 {
        let u = ProfileS::reflect(x);
        if u <= self.ramp_lo {
            return 0.0;
        }
        self.base.raw_second(u) * smooth_step_raw(self.gamma, u)
            + self.base.raw_deriv(u) * smooth_step_deriv_raw(self.gamma, u)
    }

    /// `sqrt(max(S_eta, 0))`.
    pub fn sqrt_s_eta(&self, x: f64) -> f64 {
        self.s_eta_eval(x).max(0.0).sqrt()
    }
}

/// Grid-measured slacks of the smoothed-profile invariants. Every field is a
/// margin: the invariant holds on the grid iff the margin is `>= 0`
/// (concavity compares against the 1e-6 divided-difference tolerance).
#[derive(Debug, Clone, Serialize)]
pub struct SmoothedCheck {
    pub sandwich_lower_min: f64,
    pub sandwich_upper_min: f64,
    pub factor100_min: f64,
    pub concavity_margin: f64,
    pub flat_top_ok: bool,
}

impl SmoothedCheck {
    pub fn ok(&self) -> bool {
        self.sandwich_lower_min >= 0.0
            && self.sandwich_upper_min >= 0.0
            && self.factor100_min >= 0.0
            && self.concavity_margin >= 0.0
            && self.flat_top_ok
    }
}

/// Assembles `S_eta` for a given mollifier width without any invariant
/// validation. Used by the search in [`build_smoothed`] and by diagnostics
/// that need to inspect inadmissible parameters.
pub fn assemble_smoothed(
    p: &ProfileS,
    eta: f64,
    gamma: f64,
) -> Result<SmoothedProfile, ProfileError> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(ProfileError::InvalidParam(format!(
            "eta must lie in (0, 1/2), got {eta}"
        )));
    }
    if !(gamma > 0.0) {
        return Err(ProfileError::InvalidParam(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let ramp_lo = PI + 0.25 * gamma;
    let ramp_hi = PI + 0.75 * gamma;
    let integrand = |x: f64| p.raw_deriv(x) * smooth_step_raw(gamma, x);
    let fit = ChebPair::fit(integrand, ramp_lo, ramp_hi, 192);
    let ramp_integral = fit.antiderivative(0.0);
    let ramp_total = ramp_integral.eval(ramp_hi);

    // Independent oracle: adaptive Simpson on the same integrand must agree
    // with the coefficient-space antiderivative.
    let quadrature_tol = DEFAULT_QUADRATURE_TOL;
    for frac in [0.37, 0.71, 1.0] {
        let x = ramp_lo + frac * (ramp_hi - ramp_lo);
        let oracle = adaptive_simpson(&integrand, ramp_lo, x, quadrature_tol)?;
        let got = ramp_integral.eval(x);
        if (got - oracle).abs() > 50.0 * quadrature_tol {
            return Err(ProfileError::Validation(format!(
                "mollified integral mismatch at x = {x}: chebyshev {got}, simpson {oracle}"
            )));
        }
    }

    let mut sp = SmoothedProfile {
        base: p.clone(),
        eta,
        gamma,
        x_eta: f64::NAN,
        beta_eta: f64::NAN,
        quadrature_tol,
        ramp_lo,
        ramp_hi,
        ramp_integral,
        ramp_total,
        s_at_ramp_hi: p.raw_eval(ramp_hi),
    };

    // x_eta: S_eta = 1, strictly decreasing past the ramp start.
    let f = |x: f64| sp.s_eta_eval(x) - 1.0;
    let (lo, hi) = bracket_scan(f, ramp_lo, 0.25 * gamma, PI + p.beta() + 1.0)?;
    sp.x_eta = bisect(f, lo, hi, ROOT_TOL)?;

    // beta_eta: S_eta = 0 beyond x_eta.
    let f0 = |x: f64| sp.s_eta_eval(x);
    let (lo, hi) = bracket_scan(f0, sp.x_eta, 0.05, PI + p.beta() + 2.0)?;
    sp.beta_eta = bisect(f0, lo, hi, ROOT_TOL)? - PI;

    Ok(sp)
}

/// Measures the smoothed-profile invariants on grids of `grid_n` points
/// (sandwich over the full support, curvature domination over
/// `[pi/2, x_eta]`) plus the spacing-1e-3 concavity grid.
pub fn validate_smoothed(sp: &SmoothedProfile, grid_n: usize) -> SmoothedCheck {
    let p = sp.base();
    let beta = p.beta();
    let eta = sp.eta;

    let lo = -sp.beta_eta - 1.0;
    let hi = PI + sp.beta_eta + 1.0;
    let mut sandwich_lower_min = f64::INFINITY;
    let mut sandwich_upper_min = f64::INFINITY;
    for i in 0..grid_n {
        let x = lo + (hi - lo) * i as f64 / (grid_n - 1) as f64;
        let s = p.s_eval(x);
        let se = sp.s_eta_eval(x);
        sandwich_lower_min = sandwich_lower_min.min(se - s - 0.5 * eta);
        sandwich_upper_min = sandwich_upper_min.min(s + 1.5 * eta - se);
    }

    let mut factor100_min = f64::INFINITY;
    for i in 0..grid_n {
        let x = FRAC_PI_2 + (sp.x_eta - FRAC_PI_2) * i as f64 / (grid_n - 1) as f64;
        factor100_min =
            factor100_min.min(-sp.s_eta_second(x) - 100.0 * sp.s_eta_deriv(x).abs());
    }

    let clo = -beta - 1.0;
    let chi = PI + beta + 1.0;
    let n = ((chi - clo) / CONCAVITY_SPACING).ceil() as usize;
    let h = (chi - clo) / n as f64;
    let mut max_dd = f64::NEG_INFINITY;
    for i in 1..n {
        let x = clo + i as f64 * h;
        let dd =
            (sp.s_eta_eval(x + h) - 2.0 * sp.s_eta_eval(x) + sp.s_eta_eval(x - h)) / (h * h);
        max_dd = max_dd.max(dd);
    }

    let flat = 1.0 + eta;
    let flat_top_ok = [0.0, 0.25 * PI, FRAC_PI_2, PI, -0.05 * sp.gamma]
        .iter()
        .all(|&x| sp.s_eta_eval(x) == flat);

    SmoothedCheck {
        sandwich_lower_min,
        sandwich_upper_min,
        factor100_min,
        concavity_margin: CONCAVITY_TOL - max_dd,
        flat_top_ok,
    }
}

/// Builds a validated `S_eta`, searching the mollifier width downward over a
/// geometric sequence from `alpha/2` until the sandwich, curvature-domination
/// (`-S_eta'' >= 100 |S_eta'|` on `[pi/2, x_eta]`), concavity, and flat-top
/// invariants all hold. Fails with [`ProfileError::EtaTooLarge`] when the
/// search exhausts its floor: the admissible range of `eta` is defined
/// operationally by this search.
pub fn build_smoothed(p: &ProfileS, eta: f64) -> Result<SmoothedProfile, ProfileError> {
    let mut gamma = 0.5 * p.alpha();
    while gamma >= GAMMA_FLOOR {
        if let Ok(sp) = assemble_smoothed(p, eta, gamma) {
            // Cheap screen first, full grids only for surviving candidates.
            if validate_smoothed(&sp, 2_000).ok() && validate_smoothed(&sp, 10_000).ok() {
                return Ok(sp);
            }
        }
        gamma *= 0.5;
    }
    Err(ProfileError::EtaTooLarge {
        eta,
        gamma_floor: GAMMA_FLOOR,
    })
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Flat reproducibility document for a profile pair; the heavy derived data
/// (Chebyshev pieces, distance table) is rebuilt on load and cross-checked
/// against the stored roots.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub alpha: f64,
    pub beta: f64,
    pub extension_c: f64,
    pub blend_width: f64,
    pub eta: f64,
    pub gamma: f64,
    pub x_eta: f64,
    pub beta_eta: f64,
}

impl ProfileDoc {
    pub fn from_parts(p: &ProfileS, sp: &SmoothedProfile) -> Self {
        ProfileDoc {
            alpha: p.alpha(),
            beta: p.beta(),
            extension_c: p.extension_c(),
            blend_width: p.blend_width(),
            eta: sp.eta(),
            gamma: sp.gamma(),
            x_eta: sp.x_eta(),
            beta_eta: sp.beta_eta(),
        }
    }

    /// Rebuilds the profile pair and verifies the stored roots match the
    /// recomputed ones to 1e-9.
    pub fn build(&self) -> Result<(ProfileS, SmoothedProfile), ProfileError> {
        let p = build_profile(self.alpha, self.extension_c, self.blend_width)?;
        if (p.beta() - self.beta).abs() > 1e-9 {
            return Err(ProfileError::Validation(format!(
                "stored beta {} does not match rebuilt {}",
                self.beta,
                p.beta()
            )));
        }
        let sp = assemble_smoothed(&p, self.eta, self.gamma)?;
        if !validate_smoothed(&sp, 10_000).ok() {
            return Err(ProfileError::Validation(
                "stored (eta, gamma) fail the smoothed-profile invariants".into(),
            ));
        }
        if (sp.x_eta() - self.x_eta).abs() > 1e-9 || (sp.beta_eta() - self.beta_eta).abs() > 1e-9
        {
            return Err(ProfileError::Validation(format!(
                "stored roots (x_eta {}, beta_eta {}) do not match rebuilt ({}, {})",
                self.x_eta,
                self.beta_eta,
                sp.x_eta(),
                sp.beta_eta()
            )));
        }
        Ok((p, sp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> ProfileS {
        ProfileS::builtin().unwrap()
    }

    #[test]
    fn g_values() {
        assert_eq!(g_eval(-3.0), 0.0);
        assert_eq!(g_eval(0.0), 0.0);
        assert!((g_eval(1.0) - 0.36787944117144233).abs() < 1e-16);
        // oracle: exp(-1/0.07) in 40-digit arithmetic
        assert!((g_eval(0.07) - 6.248749509463090e-7).abs() < 1e-19);
        assert!(g_eval(0.07) < 1.0 && g_eval(1e9) < 1.0);
    }

    #[test]
    fn g_flatness_at_zero() {
        // g(10^-2) / 10^(-2k) stays below 1e-10 for k = 1..=8.
        let g = g_eval(1e-2);
        for k in 1..=8 {
            assert!(g / 1e-2f64.powi(k) < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn smooth_step_plateaus_and_midpoint() {
        assert_eq!(smooth_step_eval(0.1, PI).unwrap(), 0.0);
        assert_eq!(smooth_step_eval(0.1, PI + 0.1).unwrap(), 1.0);
        // midpoint of the ramp: 1/2 by symmetry of the g-quotient (up to
        // the rounding of the ramp offset itself)
        let mid = smooth_step_eval(0.1, PI + 0.05).unwrap();
        assert!((mid - 0.5).abs() < 1e-12);
        assert!(smooth_step_eval(0.0, 1.0).is_err());
        assert!(smooth_step_eval(-1.0, 1.0).is_err());
    }

    #[test]
    fn smooth_step_monotone() {
        let gamma = 0.08;
        let mut prev = -1.0;
        for i in 0..=2000 {
            let x = PI + 0.25 * gamma + 0.5 * gamma * i as f64 / 2000.0;
            let v = smooth_step_eval(gamma, x).unwrap();
            assert!(v >= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn s_flat_and_roundoff_values() {
        let p = profile();
        assert_eq!(p.s_eval(FRAC_PI_2), 1.0);
        assert_eq!(p.s_eval(0.0), 1.0);
        assert_eq!(p.s_eval(PI), 1.0);
        // oracle: (cos 0.05 - exp(-20))^2 in 40-digit arithmetic
        assert!((p.s_eval(PI + 0.05) - 0.9975020785218575).abs() < 1e-15);
        // reflection is structural
        assert_eq!(p.s_eval(-0.3), p.s_eval(PI + 0.3));
    }

    #[test]
    fn beta_in_range_and_is_root() {
        let p = profile();
        assert!(p.alpha() < p.beta() && p.beta() < FRAC_PI_2);
        assert!(p.s_eval(PI + p.beta()).abs() < 1e-12);
        assert!(p.s_deriv(PI + p.beta()) < 0.0);
        // with the default extension the crossing lands near 1
        assert!((p.beta() - 1.0).abs() < 0.1);
    }

    #[test]
    fn c11_junctions() {
        let p = profile();
        // One-sided first derivatives at pi and 0 agree (both vanish).
        assert!((p.s_deriv(PI + 1e-12) - p.s_deriv(PI - 1e-12)).abs() <= 1e-10);
        assert!((p.s_deriv(1e-12) - p.s_deriv(-1e-12)).abs() <= 1e-10);
        // One-sided second derivatives are bounded by 10.
        for x in [PI - 1e-12, PI + 1e-12, -1e-12, 1e-12] {
            assert!(p.s_second(x).abs() <= 10.0);
        }
        // The curvature jump itself is ~2: that is the C^{1,1} corner.
        assert!(p.s_second(PI + 1e-9) < -1.9);
        assert_eq!(p.s_second(PI), 0.0);
    }

    #[test]
    fn blend_is_smooth_against_quadrature_oracle() {
        // Integrating the closed-form S'' with adaptive Simpson must
        // reproduce the Chebyshev-backed S' and S across the blend.
        let p = profile();
        let a = PI + p.alpha();
        for frac in [0.2, 0.5, 0.9, 1.0] {
            let x = a + frac * p.blend_width();
            let sp_oracle = roundoff_deriv(p.alpha())
                + adaptive_simpson(&|t| p.extension_second(t), a, x, 1e-13).unwrap();
            assert!((p.s_deriv(x) - sp_oracle).abs() < 1e-11);
            let s_oracle = roundoff(p.alpha())
                + adaptive_simpson(&|t| p.s_deriv(t), a, x, 1e-13).unwrap();
            assert!((p.s_eval(x) - s_oracle).abs() < 1e-11);
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let p = profile();
        let h = 1e-5;
        // stay away from the junction points 0 and pi
        for i in 0..400 {
            let x = -1.2 + 5.5 * i as f64 / 399.0;
            if (x - PI).abs() < 0.02 || x.abs() < 0.02 {
                continue;
            }
            let fd = (p.s_eval(x + h) - p.s_eval(x - h)) / (2.0 * h);
            let an = p.s_deriv(x);
            assert!(
                (fd - an).abs() <= 1e-6 * an.abs().max(1.0),
                "x = {x}: {fd} vs {an}"
            );
            let fd2 = (p.s_eval(x + h) - 2.0 * p.s_eval(x) + p.s_eval(x - h)) / (h * h);
            let an2 = p.s_second(x);
            assert!(
                (fd2 - an2).abs() <= 1e-4 * an2.abs().max(1.0),
                "x = {x}: {fd2} vs {an2}"
            );
        }
    }

    #[test]
    fn select_alpha_margins() {
        let alpha = select_alpha().unwrap();
        assert_eq!(alpha, 0.07);
        assert!(alpha < 1.0 / (4.0 * PI));
        let m = alpha_margins(alpha, 100_000);
        assert!(m.iter().all(|&v| v > 0.0), "{m:?}");
        // at x = 0 all three inequalities hold with equality
        assert_eq!(0f64.sin().abs(), 0.0);
    }

    #[test]
    fn epsilon0_value() {
        let p = profile();
        let e0 = epsilon0(&p);
        // oracle: 0.9 * min(1 - (cos a - g(a)), g(a)) for a = 0.07
        assert!((e0 - 5.623874558516781e-7).abs() < 1e-18);
        assert!(e0 < g_eval(p.alpha()));
        assert!(p.s_eval(PI + p.alpha()).sqrt() + e0 < 1.0);
    }

    #[test]
    fn build_profile_rejects_bad_params() {
        assert!(matches!(
            build_profile(0.2, 2.0, 0.035),
            Err(ProfileError::InvalidAlpha(_))
        ));
        assert!(build_profile(0.07, 0.0, 0.035).is_err());
        assert!(build_profile(0.07, 2.0, 0.05).is_err());
    }

    #[test]
    fn smoothed_basics() {
        let p = profile();
        let sp = build_smoothed(&p, 5e-5).unwrap();
        let eta = sp.eta();
        assert_eq!(sp.s_eta_eval(FRAC_PI_2), 1.0 + eta);
        assert_eq!(sp.s_eta_eval(PI), 1.0 + eta);
        // S_eta(x_eta) = 1 within the root tolerance, re-evaluated
        assert!((sp.s_eta_eval(sp.x_eta()) - 1.0).abs() < 1e-10);
        assert!((sp.s_eta_eval(PI + sp.beta_eta())).abs() < 1e-10);
        assert!(sp.s_eta_deriv(PI + sp.beta_eta()) != 0.0);
        assert!(sp.x_eta() > PI && sp.x_eta() < PI + sp.beta_eta());
        assert!(sp.beta_eta() > p.beta());
    }

    #[test]
    fn smoothed_invariants_hold_for_admissible_eta() {
        let p = profile();
        for eta in [5e-5, 1e-5] {
            let sp = build_smoothed(&p, eta).unwrap();
            let chk = validate_smoothed(&sp, 10_000);
            assert!(chk.ok(), "eta = {eta}: {chk:?}");
        }
    }

    #[test]
    fn eta_too_large_is_rejected() {
        // The curvature-domination property caps eta near 1e-4: the root of
        // S_eta = 1 sits at distance ~sqrt(eta) past pi, where
        // |S''|/|S'| ~ 1/sqrt(eta) must still exceed 100.
        let p = profile();
        for eta in [1e-2, 1e-3] {
            match build_smoothed(&p, eta) {
                Err(ProfileError::EtaTooLarge { .. }) => {}
                other => panic!("expected EtaTooLarge for eta = {eta}, got {other:?}"),
            }
        }
    }

    #[test]
    fn profile_doc_roundtrip() {
        let p = profile();
        let sp = build_smoothed(&p, 5e-5).unwrap();
        let doc = ProfileDoc::from_parts(&p, &sp);
        let text = serde_json::to_string(&doc).unwrap();
        let doc2: ProfileDoc = serde_json::from_str(&text).unwrap();
        let (p2, sp2) = doc2.build().unwrap();
        assert_eq!(p2.beta(), p.beta());
        assert_eq!(sp2.x_eta(), sp.x_eta());
    }
}

//! Defining functions and membership geometry.
//!
//! The base domain is `Omega = { z != 0, rho(z, w) < 0 }` with
//! `rho(z, w) = |w - exp(i ln|z|^2)|^2 - S(ln|z|^2)`. The neighborhood pieces
//! are the rotating half-planes `H_t^(delta)` and the rotating discs
//! `D^(delta, eta)`, both driven by the slowed rotation angle
//! `gamma(z) = delta*pi/2 + (1 - delta) ln|z|^2` and the tilt
//! `delta_tilde = sin(delta*pi / (2(1 - delta)))` that moves the rotation
//! center to `-i*delta_tilde`.
//!
//! `distance_to_omega` exploits the rotational symmetry in `z`: for a fixed
//! profile angle `s` the nearest point of the closed disc fiber is along the
//! segment to its center, which collapses the 4-dimensional minimization to a
//! 1-dimensional one over `s` (dense precomputed grid plus golden-section
//! refinement).

use crate::profiles::{ProfileS, SmoothedProfile};
use crate::roots::golden_min;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("off chart: z = 0 is outside the domain of the defining functions")]
    OffChart,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

/// A point `(z, w)` of `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCW {
    pub z: Complex64,
    pub w: Complex64,
}

impl PointCW {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        PointCW { z, w }
    }

    pub fn from_parts(zr: f64, zi: f64, wr: f64, wi: f64) -> Self {
        PointCW {
            z: Complex64::new(zr, zi),
            w: Complex64::new(wr, wi),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.z.re.is_finite() && self.z.im.is_finite() && self.w.re.is_finite() && self.w.im.is_finite()
    }
}

/// Neighborhood parameters: tube radius `epsilon`, smoothing `eta`, rotation
/// tilt `delta`, half-plane offset `t`, and the cached tilt displacement
/// `delta_tilde`.
#[derive(Debug, Clone, Copy)]
pub struct RotationParams {
    epsilon: f64,
    eta: f64,
    delta: f64,
    t: f64,
    delta_tilde: f64,
}

impl RotationParams {
    pub fn new(epsilon: f64, eta: f64, delta: f64, t: f64) -> Result<Self, GeomError> {
        if !(epsilon > 0.0) {
            return Err(GeomError::InvalidParam(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(GeomError::InvalidParam(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        if !(0.0..1.0).contains(&t) {
            return Err(GeomError::InvalidParam(format!(
                "t must lie in [0, 1), got {t}"
            )));
        }
        Ok(RotationParams {
            epsilon,
            eta,
            delta,
            t,
            delta_tilde: (delta * PI / (2.0 * (1.0 - delta))).sin(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `sin(delta*pi / (2(1 - delta)))`.
    pub fn delta_tilde(&self) -> f64 {
        self.delta_tilde
    }

    /// Same parameters with a different half-plane offset.
    pub fn with_t(&self, t: f64) -> Result<Self, GeomError> {
        RotationParams::new(self.epsilon, self.eta, self.delta, t)
    }

    /// `(w + i*delta_tilde) * exp(-i*gamma(z))` — the recentered, derotated
    /// `w`-coordinate every half-plane/disc formula is written in.
    #[inline]
    pub(crate) fn derotated(&self, pt: PointCW) -> Complex64 {
        let gamma = self.rotation_angle_raw(pt.z);
        (pt.w + Complex64::new(0.0, self.delta_tilde)) * Complex64::from_polar(1.0, -gamma)
    }

    #[inline]
    pub(crate) fn rotation_angle_raw(&self, z: Complex64) -> f64 {
        self.delta * FRAC_PI_2 + (1.0 - self.delta) * z.norm_sqr().ln()
    }
}

#[inline]
fn require_chart(z: Complex64) -> Result<(), GeomError> {
    if z.norm_sqr() > 0.0 {
        Ok(())
    } else {
        Err(GeomError::OffChart)
    }
}

/// `rho(z, w) = |w - exp(i ln|z|^2)|^2 - S(ln|z|^2)`; negative exactly on
/// `Omega`.
pub fn rho_eval(p: &ProfileS, pt: PointCW) -> Result<f64, GeomError> {
    require_chart(pt.z)?;
    Ok(rho_raw(p, pt))
}

#[inline]
pub(crate) fn rho_raw(p: &ProfileS, pt: PointCW) -> f64 {
    let s = pt.z.norm_sqr().ln();
    let center = Complex64::from_polar(1.0, s);
    (pt.w - center).norm_sqr() - p.s_eval(s)
}

/// Rotation angle `gamma(z) = delta*pi/2 + (1 - delta) ln|z|^2`.
pub fn rotation_angle(rp: &RotationParams, z: Complex64) -> Result<f64, GeomError> {
    require_chart(z)?;
    Ok(rp.rotation_angle_raw(z))
}

/// `Re((w + i*delta_tilde) exp(-i*gamma(z))) - t`; positive exactly on
/// `H_t^(delta)`.
pub fn halfplane_margin(rp: &RotationParams, pt: PointCW) -> Result<f64, GeomError> {
    require_chart(pt.z)?;
    Ok(halfplane_margin_raw(rp, pt))
}

#[inline]
pub(crate) fn halfplane_margin_raw(rp: &RotationParams, pt: PointCW) -> f64 {
    rp.derotated(pt).re - rp.t
}

/// `|w + i*delta_tilde - exp(i*gamma(z))|^2 - S_eta(gamma(z))`; negative
/// exactly on `D^(delta, eta)`.
pub fn rho_delta_eta_eval(
    rp: &RotationParams,
    sp: &SmoothedProfile,
    pt: PointCW,
) -> Result<f64, GeomError> {
    require_chart(pt.z)?;
    Ok(rho_delta_eta_raw(rp, sp, pt))
}

#[inline]
pub(crate) fn rho_delta_eta_raw(rp: &RotationParams, sp: &SmoothedProfile, pt: PointCW) -> f64 {
    let gamma = rp.rotation_angle_raw(pt.z);
    let b = pt.w + Complex64::new(0.0, rp.delta_tilde) - Complex64::from_polar(1.0, gamma);
    b.norm_sqr() - sp.s_eta_eval(gamma)
}

/// Membership in `D = D^(delta, eta) ∩ H_t^(delta)`; `z = 0` yields `false`
/// rather than an error.
pub fn in_domain_d(rp: &RotationParams, sp: &SmoothedProfile, pt: PointCW) -> bool {
    pt.z.norm_sqr() > 0.0
        && rho_delta_eta_raw(rp, sp, pt) < 0.0
        && halfplane_margin_raw(rp, pt) > 0.0
}

/// Distance objective at profile angle `s` for a point with `|z| = az` and
/// `w = (wx, wy)`: nearest point of the closed disc fiber
/// `{|z| = e^{s/2}} x D(e^{is}, sqrt(S(s)))`. Any single evaluation is an
/// upper bound for `distance_to_omega`.
#[inline]
pub(crate) fn fiber_distance(p: &ProfileS, az: f64, wx: f64, wy: f64, s: f64) -> f64 {
    let dz = az - (0.5 * s).exp();
    let dx = wx - s.cos();
    let dy = wy - s.sin();
    let dw = (dx * dx + dy * dy).sqrt() - p.sqrt_s(s);
    let dw = dw.max(0.0);
    (dz * dz + dw * dw).sqrt()
}

/// Euclidean distance from `pt` to the closure of `Omega`.
///
/// Points of the closure (chart angle in `[-beta, pi+beta]` and `rho <= 0`)
/// return exactly `0`; otherwise the fiber objective is minimized over the
/// precomputed 2*10^4-node grid of `[-beta, pi+beta]` and refined by
/// golden-section around the best node.
pub fn distance_to_omega(p: &ProfileS, pt: PointCW) -> f64 {
    let az = pt.z.norm();
    if az > 0.0 {
        let s = pt.z.norm_sqr().ln();
        if (-p.beta()..=PI + p.beta()).contains(&s) && rho_raw(p, pt) <= 0.0 {
            return 0.0;
        }
    }
    let (wx, wy) = (pt.w.re, pt.w.im);
    let nodes = &p.dist_nodes;
    let mut best_sq = f64::INFINITY;
    let mut best_i = 0usize;
    for (i, nd) in nodes.iter().enumerate() {
        let dz = az - nd.radius;
        let dx = wx - nd.cx;
        let dy = wy - nd.cy;
        let dw = (dx * dx + dy * dy).sqrt() - nd.w_rad;
        let dw = if dw > 0.0 { dw } else { 0.0 };
        let d_sq = dz * dz + dw * dw;
        if d_sq < best_sq {
            best_sq = d_sq;
            best_i = i;
        }
    }
    let lo = nodes[best_i.saturating_sub(1)].s;
    let hi = nodes[(best_i + 1).min(nodes.len() - 1)].s;
    // 48 golden steps take the two-node bracket below 1e-13 in s.
    let refined = golden_min(|s| fiber_distance(p, az, wx, wy, s), lo, hi, 48);
    refined.min(best_sq.sqrt())
}

/// Membership in the open tube `Omega(r)` of radius `r > 0` around the
/// closure.
pub fn omega_neighborhood_contains(
    p: &ProfileS,
    r: f64,
    pt: PointCW,
) -> Result<bool, GeomError> {
    if !(r > 0.0) {
        return Err(GeomError::InvalidParam(format!(
            "tube radius must be positive, got {r}"
        )));
    }
    Ok(distance_to_omega(p, pt) < r)
}

/// Norm of the real gradient of `rho` at `pt`, from the Wirtinger partials:
/// `|grad rho|^2 = 4(|d rho/dz|^2 + |d rho/dw|^2)`.
pub fn rho_gradient_norm(p: &ProfileS, pt: PointCW) -> Result<f64, GeomError> {
    require_chart(pt.z)?;
    let s = pt.z.norm_sqr().ln();
    let center = Complex64::from_polar(1.0, s);
    let b = pt.w - center;
    // d rho/dz = (-2 Im(B * conj(center)) - S'(s)) / z
    let rho_z = Complex64::new(-2.0 * (b * center.conj()).im - p.s_deriv(s), 0.0) / pt.z;
    let rho_w = b.conj();
    Ok(2.0 * (rho_z.norm_sqr() + rho_w.norm_sqr()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{assemble_smoothed, build_smoothed};

    fn profile() -> ProfileS {
        ProfileS::builtin().unwrap()
    }

    fn pt(zr: f64, wr: f64, wi: f64) -> PointCW {
        PointCW::from_parts(zr, 0.0, wr, wi)
    }

    const E_PI_4: f64 = 2.1932800507380152; // exp(pi/4)

    #[test]
    fn rho_examples() {
        let p = profile();
        // (e^{pi/4}, i): ln|z|^2 = pi/2, center = i, rho = 0 - 1
        let v = rho_eval(&p, pt(E_PI_4, 0.0, 1.0)).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
        // (e^{pi/4}, 0) and (e^{pi/4}, 2i) are boundary points
        assert!(rho_eval(&p, pt(E_PI_4, 0.0, 0.0)).unwrap().abs() < 1e-12);
        assert!(rho_eval(&p, pt(E_PI_4, 0.0, 2.0)).unwrap().abs() < 1e-12);
        assert_eq!(
            rho_eval(&p, pt(0.0, 0.0, 1.0)),
            Err(GeomError::OffChart)
        );
    }

    #[test]
    fn rotation_angle_examples() {
        let rp = RotationParams::new(0.1, 0.0, 0.1, 0.0).unwrap();
        let g = rotation_angle(&rp, Complex64::new(E_PI_4, 0.0)).unwrap();
        assert!((g - FRAC_PI_2).abs() < 1e-12);
        let g1 = rotation_angle(&rp, Complex64::new(1.0, 0.0)).unwrap();
        assert!((g1 - 0.05 * PI).abs() < 1e-15);
        // delta -> 0 recovers the plain angle ln|z|^2
        let rp0 = RotationParams::new(0.1, 0.0, 1e-12, 0.0).unwrap();
        let z = Complex64::new(1.7, -0.4);
        assert!((rotation_angle(&rp0, z).unwrap() - z.norm_sqr().ln()).abs() < 1e-10);
    }

    #[test]
    fn halfplane_margin_examples() {
        // delta = 0.1: delta_tilde = sin(pi/18)
        let rp = RotationParams::new(0.1, 0.0, 0.1, 0.0).unwrap();
        assert!((rp.delta_tilde() - 0.17364817766693033).abs() < 1e-16);
        // gamma = pi/2 at |z| = e^{pi/4}, w = 0: margin = Re(i*dt * -i) = dt
        let m = halfplane_margin(&rp, pt(E_PI_4, 0.0, 0.0)).unwrap();
        assert!((m - rp.delta_tilde()).abs() < 1e-15);
        // w = -i*delta_tilde sits on the boundary of H_0 for every z
        for zr in [0.7, 1.3, E_PI_4] {
            let m = halfplane_margin(&rp, pt(zr, 0.0, -rp.delta_tilde())).unwrap();
            assert!(m.abs() < 1e-15);
        }
    }

    #[test]
    fn rho_delta_eta_examples() {
        let p = profile();
        // eta = 0.01 is fine for the formula itself (no invariant validation)
        let sp = assemble_smoothed(&p, 0.01, 0.01).unwrap();
        let rp = RotationParams::new(0.1, sp.eta(), 0.1, 0.0).unwrap();
        // (e^{pi/4}, i): gamma = pi/2, value = dt^2 - (1 + eta)
        let v = rho_delta_eta_eval(&rp, &sp, pt(E_PI_4, 0.0, 1.0)).unwrap();
        let dt = rp.delta_tilde();
        assert!((v - (dt * dt - 1.01)).abs() < 1e-12);
        assert!(v < 0.0);
        // disc center: value = -S_eta(gamma)
        for zr in [0.8, 1.9] {
            let z = Complex64::new(zr, 0.0);
            let gamma = rotation_angle(&rp, z).unwrap();
            let w = Complex64::from_polar(1.0, gamma) - Complex64::new(0.0, dt);
            let v = rho_delta_eta_eval(&rp, &sp, PointCW::new(z, w)).unwrap();
            assert!((v + sp.s_eta_eval(gamma)).abs() < 1e-12);
        }
        // constructed boundary point: center + sqrt(S_eta) e^{i theta0}
        let z = Complex64::new(1.2, 0.4);
        let gamma = rotation_angle(&rp, z).unwrap();
        for theta0 in [0.0, 1.1, 2.9, -2.0] {
            let w = Complex64::from_polar(1.0, gamma) - Complex64::new(0.0, dt)
                + Complex64::from_polar(sp.sqrt_s_eta(gamma), theta0);
            let v = rho_delta_eta_eval(&rp, &sp, PointCW::new(z, w)).unwrap();
            assert!(v.abs() < 1e-12, "theta0 = {theta0}: {v}");
        }
    }

    #[test]
    fn in_domain_d_composition() {
        let p = profile();
        let sp = build_smoothed(&p, 5e-5).unwrap();
        let rp = RotationParams::new(0.1, sp.eta(), 1e-6, 0.0).unwrap();
        assert!(in_domain_d(&rp, &sp, pt(E_PI_4, 0.0, 1.0)));
        assert!(!in_domain_d(&rp, &sp, pt(0.0, 0.0, 0.0)));
        // far outside the disc family
        assert!(!in_domain_d(&rp, &sp, pt(E_PI_4, 0.0, 5.0)));
    }

    #[test]
    fn distance_members_and_boundary() {
        let p = profile();
        assert_eq!(distance_to_omega(&p, pt(E_PI_4, 0.0, 1.0)), 0.0);
        // w = 0 circle over 1 <= |z|^2 <= e^pi lies on the boundary
        for f in [0.0, 0.3, 0.8, 1.0] {
            let zr = (0.5 * f * PI).exp();
            let d = distance_to_omega(&p, pt(zr, 0.0, 0.0));
            assert!(d <= 1e-9, "f = {f}: {d}");
        }
    }

    #[test]
    fn distance_half_unit_example() {
        let p = profile();
        // 0.5 beyond the top of the w-disc at s = pi/2
        let d = distance_to_omega(&p, pt(E_PI_4, 0.0, 2.5));
        assert!((d - 0.5).abs() < 1e-9, "{d}");
        assert!(!omega_neighborhood_contains(&p, 0.4, pt(E_PI_4, 0.0, 2.5)).unwrap());
        assert!(omega_neighborhood_contains(&p, 0.6, pt(E_PI_4, 0.0, 2.5)).unwrap());
        assert!(omega_neighborhood_contains(&p, 1e-12, pt(E_PI_4, 0.0, 1.0)).unwrap());
        assert!(omega_neighborhood_contains(&p, 0.0, pt(E_PI_4, 0.0, 1.0)).is_err());
    }

    #[test]
    fn gradient_norm_matches_finite_differences() {
        let p = profile();
        let h = 1e-6;
        for (zr, zi, wr, wi) in [
            (E_PI_4, 0.0, 0.0, 0.3),
            (1.1, 0.7, -0.2, 0.9),
            (0.9, -0.3, 0.5, -0.4),
        ] {
            let q = PointCW::from_parts(zr, zi, wr, wi);
            let g = rho_gradient_norm(&p, q).unwrap();
            let f = |a: f64, b: f64, c: f64, d: f64| {
                rho_raw(&p, PointCW::from_parts(a, b, c, d))
            };
            let gx = (f(zr + h, zi, wr, wi) - f(zr - h, zi, wr, wi)) / (2.0 * h);
            let gy = (f(zr, zi + h, wr, wi) - f(zr, zi - h, wr, wi)) / (2.0 * h);
            let gu = (f(zr, zi, wr + h, wi) - f(zr, zi, wr - h, wi)) / (2.0 * h);
            let gv = (f(zr, zi, wr, wi + h) - f(zr, zi, wr, wi - h)) / (2.0 * h);
            let fd = (gx * gx + gy * gy + gu * gu + gv * gv).sqrt();
            assert!((g - fd).abs() < 1e-6 * fd.max(1.0), "{g} vs {fd}");
        }
    }
}

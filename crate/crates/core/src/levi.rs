//! Levi forms of the half-plane and disc defining functions in the
//! distinguished complex tangent direction `(-df/dw, df/dz)` (never
//! normalized), plus a finite-difference complex Hessian cross-check.
//!
//! With `A = (w + i*delta_tilde) exp(-i*gamma(z))` and `gamma_z = (1-delta)/z`:
//!
//! * half-plane `r = t - Re(A)`: the Levi form collapses to
//!   `(1-delta)^2 (t - r) / (4|z|^2)`, i.e. `(1-delta)^2 t / (4|z|^2)` on the
//!   boundary `r = 0`;
//! * disc `rho = |A - 1|^2 |...| - S_eta(gamma)` (written in `w`): on the
//!   boundary,
//!   `|z|^2 L / (1-delta)^2 = S_eta (-S_eta'' + 2 Re A) - 2 S_eta' Re(iA) + S_eta'^2`.
//!
//! Boundary points decompose as `A = 1 + sqrt(S_eta) e^{i theta}`, which is
//! what the two sign cases (`S_eta <= 1` and `S_eta > 1`) are phrased in.

use crate::geometry::{rho_delta_eta_raw, GeomError, PointCW, RotationParams};
use crate::profiles::SmoothedProfile;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LeviError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("finite-difference step {0:e} outside [1e-6, 1e-3]")]
    StepOutOfRange(f64),
    #[error("not a boundary point: rho_delta_eta = {rho:e} exceeds 1e-9")]
    NotBoundary { rho: f64 },
}

/// Which boundary case a disc sample falls in, or the half-plane family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    DiscLe1,
    DiscGt1,
    Halfplane,
}

/// One certified Levi evaluation.
#[derive(Debug, Clone, Copy)]
pub struct LeviSample {
    pub point: PointCW,
    pub value: f64,
    pub defect: f64,
    pub case_tag: CaseTag,
}

/// Levi form of the half-plane defining function `r = t - Re(A)` in direction
/// `(-dr/dw, dr/dz)`: equals `(1-delta)^2 (t - r) / (4 |z|^2)`.
pub fn levi_halfplane(rp: &RotationParams, pt: PointCW) -> Result<f64, LeviError> {
    let q = pt.z.norm_sqr();
    if q == 0.0 {
        return Err(GeomError::OffChart.into());
    }
    let re_a = rp.derotated(pt).re;
    let om = 1.0 - rp.delta();
    Ok(om * om * re_a / (4.0 * q))
}

/// Levi form of the disc defining function in direction
/// `(-d rho/dw, d rho/dz)`, using the boundary identity
/// `|B|^2 = S_eta(gamma)` (intended for points with `rho_delta_eta ≈ 0`).
pub fn levi_disc(
    rp: &RotationParams,
    sp: &SmoothedProfile,
    pt: PointCW,
) -> Result<f64, LeviError> {
    let q = pt.z.norm_sqr();
    if q == 0.0 {
        return Err(GeomError::OffChart.into());
    }
    let gamma = rp.rotation_angle_raw(pt.z);
    let a = rp.derotated(pt);
    let se = sp.s_eta_eval(gamma);
    let d1 = sp.s_eta_deriv(gamma);
    let d2 = sp.s_eta_second(gamma);
    // Re(i*A) = -Im(A)
    let scaled = se * (-d2 + 2.0 * a.re) + 2.0 * d1 * a.im + d1 * d1;
    let om = 1.0 - rp.delta();
    Ok(om * om * scaled / q)
}

/// Boundary decomposition `A = 1 + sqrt(S_eta(gamma)) e^{i theta}`: returns
/// `(S_eta(gamma), theta, case tag)`. Errors unless `|rho_delta_eta| <= 1e-9`.
pub fn levi_disc_decompose(
    rp: &RotationParams,
    sp: &SmoothedProfile,
    pt: PointCW,
) -> Result<(f64, f64, CaseTag), LeviError> {
    let q = pt.z.norm_sqr();
    if q == 0.0 {
        return Err(GeomError::OffChart.into());
    }
    let rho = rho_delta_eta_raw(rp, sp, pt);
    if rho.abs() > 1e-9 {
        return Err(LeviError::NotBoundary { rho });
    }
    let gamma = rp.rotation_angle_raw(pt.z);
    let s_val = sp.s_eta_eval(gamma);
    let theta = (rp.derotated(pt) - Complex64::new(1.0, 0.0)).arg();
    let tag = if s_val <= 1.0 {
        CaseTag::DiscLe1
    } else {
        CaseTag::DiscGt1
    };
    Ok((s_val, theta, tag))
}

/// Defining-function choice for the finite-difference cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefiningFn {
    Halfplane,
    Disc,
}

/// Levi form of an arbitrary real-valued `f` on `C^2` in direction
/// `(-df/dw, df/dz)`, everything by central differences with step `h`.
pub(crate) fn levi_fd_of(f: &dyn Fn(PointCW) -> f64, pt: PointCW, h: f64) -> f64 {
    let x0 = [pt.z.re, pt.z.im, pt.w.re, pt.w.im];
    let at = |x: [f64; 4]| f(PointCW::from_parts(x[0], x[1], x[2], x[3]));
    let shift = |mut x: [f64; 4], i: usize, d: f64| {
        x[i] += d;
        x
    };

    let mut grad = [0.0; 4];
    for i in 0..4 {
        grad[i] = (at(shift(x0, i, h)) - at(shift(x0, i, -h))) / (2.0 * h);
    }
    let f0 = at(x0);
    let mut hess = [[0.0; 4]; 4];
    for i in 0..4 {
        hess[i][i] = (at(shift(x0, i, h)) - 2.0 * f0 + at(shift(x0, i, -h))) / (h * h);
        for j in (i + 1)..4 {
            let pp = at(shift(shift(x0, i, h), j, h));
            let pm = at(shift(shift(x0, i, h), j, -h));
            let mp = at(shift(shift(x0, i, -h), j, h));
            let mm = at(shift(shift(x0, i, -h), j, -h));
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }

    // d^2 f / (d zeta_j d zeta-bar_k) = 1/4 [f_{x_j x_k} + f_{y_j y_k}
    //                                        + i (f_{x_j y_k} - f_{y_j x_k})]
    let cplx = |j: usize, k: usize| {
        Complex64::new(
            hess[2 * j][2 * k] + hess[2 * j + 1][2 * k + 1],
            hess[2 * j][2 * k + 1] - hess[2 * j + 1][2 * k],
        ) * 0.25
    };
    let fz = Complex64::new(grad[0], -grad[1]) * 0.5;
    let fw = Complex64::new(grad[2], -grad[3]) * 0.5;
    let dir = [-fw, fz];

    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..2 {
        for k in 0..2 {
            acc += cplx(j, k) * dir[j] * dir[k].conj();
        }
    }
    acc.re
}

/// Finite-difference Levi value of the chosen defining function at `pt`;
/// populates `LeviSample::defect` against the closed forms.
pub fn levi_fd_check(
    which: DefiningFn,
    rp: &RotationParams,
    sp: &SmoothedProfile,
    pt: PointCW,
    h: f64,
) -> Result<f64, LeviError> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(LeviError::StepOutOfRange(h));
    }
    if pt.z.norm_sqr() == 0.0 {
        return Err(GeomError::OffChart.into());
    }
    let rp = *rp;
    let value = match which {
        DefiningFn::Halfplane => {
            let f = move |q: PointCW| rp.t() - rp.derotated(q).re;
            levi_fd_of(&f, pt, h)
        }
        DefiningFn::Disc => {
            let f = move |q: PointCW| rho_delta_eta_raw(&rp, sp, q);
            levi_fd_of(&f, pt, h)
        }
    };
    Ok(value)
}

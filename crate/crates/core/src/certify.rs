//! Certification suite: grid sweeps for the lemma-level inequalities,
//! deterministic sampling checks for the containments and Levi-form signs,
//! searches for the existence-only parameters (`d1`, `eta1`, `d2`, `t_delta`),
//! and the witness tables quantifying the failure of polynomially tight
//! pseudoconvex neighborhoods.
//!
//! Every check reports margins: the minimal slack of the inequality family it
//! certifies, together with where the minimum sits. Searches use coarse
//! sampling for their inner predicates; final certification always re-runs at
//! full resolution.

use crate::geometry::{
    self, fiber_distance, halfplane_margin_raw, rho_delta_eta_raw, rho_gradient_norm, rho_raw,
    GeomError, PointCW, RotationParams,
};
use crate::levi::{levi_disc, levi_fd_check, levi_halfplane, CaseTag, DefiningFn, LeviError};
use crate::profiles::{build_smoothed, epsilon0, g_eval, ProfileError, ProfileS, SmoothedProfile};
use crate::reduce::{par_max, par_min};
use crate::report::{CertReport, GridAxis, ParamsSnapshot};
use crate::roots::golden_min;
use crate::sampling::halton;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("eps = {eps:e} outside (0, eps0 = {eps0:e})")]
    EpsOutOfRange { eps: f64, eps0: f64 },
    #[error("search failed in {which}: {detail}")]
    SearchFailed { which: String, detail: String },
    #[error("witness assertion failed: {0}")]
    WitnessViolation(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Levi(#[from] LeviError),
}

// ---------------------------------------------------------------------------
// Witness machinery (annuli, Lipschitz constants, divergence tables)
// ---------------------------------------------------------------------------

/// `x_eps = pi + 1/(-ln(eps/2))` without the admissibility gate.
pub fn x_epsilon_raw(eps: f64) -> f64 {
    PI + 1.0 / (-(0.5 * eps).ln())
}

/// Root of `H_eps(x) = eps/2 - g(x - pi)` for an admissible tube radius
/// `0 < eps < eps0`; verifies the root identity to 1e-12.
pub fn x_epsilon(p: &ProfileS, eps: f64) -> Result<f64, CertifyError> {
    let e0 = epsilon0(p);
    if !(eps > 0.0 && eps < e0) {
        return Err(CertifyError::EpsOutOfRange { eps, eps0: e0 });
    }
    let x = x_epsilon_raw(eps);
    let residual = 0.5 * eps - g_eval(x - PI);
    if residual.abs() > 1e-12 {
        return Err(CertifyError::WitnessViolation(format!(
            "H_eps(x_eps) = {residual:e} exceeds 1e-12"
        )));
    }
    Ok(x)
}

/// The witness point `p_eps = (e^{pi/4}, i sin(x_eps))`.
pub fn witness_point(p: &ProfileS, eps: f64) -> Result<PointCW, CertifyError> {
    let x = x_epsilon(p, eps)?;
    Ok(PointCW::new(
        Complex64::new((0.25 * PI).exp(), 0.0),
        Complex64::new(0.0, x.sin()),
    ))
}

/// Certifies the annulus hypotheses for tube radius `eps`: for `phi` on a
/// grid of `[pi, x_eps]`, both boundary circles
/// `{|z|^2 in {e^phi, e^{pi-phi}}, w = i sin(phi)}` lie within `eps` of the
/// closed domain, and the bottom annulus `{1 <= |z|^2 <= e^pi, w = 0}` sits on
/// the boundary (distance 0, asserted to 1e-12).
///
/// Distances are bounded from above by `min(distance_to_omega, fiber probe at
/// the defining angle)`; the probe keeps the margin meaningful when `eps`
/// approaches the refinement tolerance of the distance minimizer.
pub fn certify_annuli(
    p: &ProfileS,
    eps: f64,
    phi_grid: usize,
) -> Result<CertReport, CertifyError> {
    let start = Instant::now();
    let x_eps = x_epsilon(p, eps)?;
    let n = phi_grid.max(2);

    // 2n circle checks: index 2j (+0 outer shell, +1 inner shell).
    let circle = |i: usize| {
        let j = i / 2;
        let phi = PI + (x_eps - PI) * j as f64 / (n - 1) as f64;
        let s = if i % 2 == 0 { phi } else { PI - phi };
        let pt = PointCW::new(
            Complex64::new((0.5 * s).exp(), 0.0),
            Complex64::new(0.0, phi.sin()),
        );
        let d = geometry::distance_to_omega(p, pt)
            .min(fiber_distance(p, pt.z.norm(), pt.w.re, pt.w.im, s));
        eps - d
    };
    let worst_circle = par_min(2 * n, circle);

    let bottom = |j: usize| {
        let l = PI * j as f64 / (n - 1) as f64;
        let pt = PointCW::new(Complex64::new((0.5 * l).exp(), 0.0), Complex64::new(0.0, 0.0));
        let d = geometry::distance_to_omega(p, pt)
            .min(fiber_distance(p, pt.z.norm(), pt.w.re, pt.w.im, l));
        1e-12 - d
    };
    let worst_bottom = par_min(n, bottom);

    let (min_margin, argmin) = if worst_circle.value <= worst_bottom.value {
        let j = worst_circle.index / 2;
        let phi = PI + (x_eps - PI) * j as f64 / (n - 1) as f64;
        (
            worst_circle.value,
            vec![phi, (worst_circle.index % 2) as f64],
        )
    } else {
        let l = PI * worst_bottom.index as f64 / (n - 1) as f64;
        (worst_bottom.value, vec![l, 2.0])
    };

    Ok(CertReport::new(
        "annuli",
        ParamsSnapshot::of(p).with_epsilon(eps),
        vec![
            GridAxis::new("phi", n, PI, x_eps),
            GridAxis::new("family", 3, 0.0, 2.0),
        ],
        min_margin,
        argmin,
        0.0,
        start.elapsed().as_secs_f64(),
    )
    .with_extra("circle_min_margin", worst_circle.value)
    .with_extra("bottom_max_distance", 1e-12 - worst_bottom.value))
}

/// Lipschitz data for the distance lower bound: `lip_L` majorizes the
/// gradient norm of `rho` over a dense deterministic sample of the closed
/// tube `Omega(lip_radius)` with a 5% safety factor.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessConstants {
    pub lip_radius: f64,
    pub lip_l: f64,
    pub s_list: Vec<f64>,
}

pub fn lipschitz_constants(
    p: &ProfileS,
    lip_radius: f64,
    sample_n: usize,
) -> Result<WitnessConstants, CertifyError> {
    let beta = p.beta();
    if !(lip_radius > 0.0) || (-0.5 * beta).exp() - lip_radius <= 0.0 {
        return Err(CertifyError::SearchFailed {
            which: "lipschitz_constants".into(),
            detail: format!("lip_radius {lip_radius} too large: tube reaches the z = 0 chart edge"),
        });
    }
    let worst = par_max(sample_n, |k| {
        let k = k as u64;
        let s = -beta + (PI + 2.0 * beta) * halton(11, k, 0);
        let theta = 2.0 * PI * halton(11, k, 1);
        // boundary-biased radial factor inside the disc fiber
        let r = 1.0 - halton(11, k, 2).powi(3);
        let base_w = Complex64::from_polar(1.0, s) + Complex64::from_polar(r * p.sqrt_s(s), theta);
        let base_z = Complex64::new((0.5 * s).exp(), 0.0);
        // outward offset within the tube, biased to the outer shell
        let mag = lip_radius * halton(11, k, 3).sqrt().sqrt();
        let a1 = PI * halton(11, k, 4);
        let a2 = 2.0 * PI * halton(11, k, 5);
        let dir = [
            a1.cos(),
            a1.sin() * a2.cos(),
            a1.sin() * a2.sin() * theta.cos(),
            a1.sin() * a2.sin() * theta.sin(),
        ];
        let pt = PointCW::from_parts(
            base_z.re + mag * dir[0],
            base_z.im + mag * dir[1],
            base_w.re + mag * dir[2],
            base_w.im + mag * dir[3],
        );
        if pt.z.norm_sqr() == 0.0 {
            return f64::NEG_INFINITY;
        }
        rho_gradient_norm(p, pt).unwrap_or(f64::NEG_INFINITY)
    });
    Ok(WitnessConstants {
        lip_radius,
        lip_l: 1.05 * worst.value,
        s_list: vec![1.0, 2.0, 4.0],
    })
}

/// One row of the divergence table.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessRow {
    pub eps: f64,
    pub x_eps_minus_pi: f64,
    pub rho_witness: f64,
    pub dist_witness: f64,
    /// `(x_eps - pi)^s / eps` for each exponent in `s_list`.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessTable {
    pub s_list: Vec<f64>,
    pub lip_radius: f64,
    pub lip_l: f64,
    pub rows: Vec<WitnessRow>,
}

/// Builds the witness table and asserts, per row: the root identity
/// `g(x_eps - pi) = eps/2` (1e-12 relative), `rho(p_eps) >= x_eps - pi`, the
/// Lipschitz distance lower bound, and — across rows — strict growth of every
/// ratio column as `eps` decreases.
pub fn witness_table(
    p: &ProfileS,
    wc: &WitnessConstants,
    eps_list: &[f64],
) -> Result<WitnessTable, CertifyError> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let x = x_epsilon(p, eps)?;
        let u = x - PI;
        let rel = (2.0 * g_eval(u) / eps - 1.0).abs();
        if rel > 1e-12 {
            return Err(CertifyError::WitnessViolation(format!(
                "g(x_eps - pi) vs eps/2 relative error {rel:e} at eps = {eps:e}"
            )));
        }
        let pe = witness_point(p, eps)?;
        let rho = rho_raw(p, pe);
        if rho < u {
            return Err(CertifyError::WitnessViolation(format!(
                "rho(p_eps) = {rho} < x_eps - pi = {u} at eps = {eps:e}"
            )));
        }
        let dist = geometry::distance_to_omega(p, pe);
        let bound = wc.lip_radius.min(u / wc.lip_l);
        if dist < bound {
            return Err(CertifyError::WitnessViolation(format!(
                "d(p_eps, Omega) = {dist} below Lipschitz bound {bound} at eps = {eps:e}"
            )));
        }
        let ratios = wc.s_list.iter().map(|&s| u.powf(s) / eps).collect();
        rows.push(WitnessRow {
            eps,
            x_eps_minus_pi: u,
            rho_witness: rho,
            dist_witness: dist,
            ratios,
        });
    }
    // Strict divergence along decreasing eps.
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[b].eps.total_cmp(&rows[a].eps));
    for si in 0..wc.s_list.len() {
        for w in order.windows(2) {
            let (hi, lo) = (w[0], w[1]);
            if !(rows[lo].ratios[si] > rows[hi].ratios[si]) {
                return Err(CertifyError::WitnessViolation(format!(
                    "ratio column s = {} not strictly increasing between eps {:e} and {:e}",
                    wc.s_list[si], rows[hi].eps, rows[lo].eps
                )));
            }
        }
    }
    Ok(WitnessTable {
        s_list: wc.s_list.clone(),
        lip_radius: wc.lip_radius,
        lip_l: wc.lip_l,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Crucial estimate and the d1 search
// ---------------------------------------------------------------------------

/// The crucial-estimate expression
/// `cos(delta(pi/2 - psi)) - sqrt(S(psi)) + sin(psi + delta(pi/2 - psi)) * delta_tilde(delta)`.
pub fn crucial_expr(p: &ProfileS, delta: f64, psi: f64) -> f64 {
    let bend = delta * (FRAC_PI_2 - psi);
    let tilt = (delta * PI / (2.0 * (1.0 - delta))).sin();
    bend.cos() - p.sqrt_s(psi) + (psi + bend).sin() * tilt
}

/// Sweeps the crucial estimate over `(0, delta_max] x [-beta, pi+beta]`;
/// passes iff the minimal value is strictly positive.
pub fn certify_crucial_estimate(
    p: &ProfileS,
    delta_max: f64,
    n_delta: usize,
    n_psi: usize,
) -> CertReport {
    let start = Instant::now();
    let beta = p.beta();
    let lo = -beta;
    let hi = PI + beta;
    let worst = par_min(n_delta * n_psi, |i| {
        let di = i / n_psi;
        let pj = i % n_psi;
        let delta = delta_max * (di + 1) as f64 / n_delta as f64;
        let psi = lo + (hi - lo) * pj as f64 / (n_psi - 1) as f64;
        crucial_expr(p, delta, psi)
    });
    let delta = delta_max * ((worst.index / n_psi) + 1) as f64 / n_delta as f64;
    let psi = lo + (hi - lo) * (worst.index % n_psi) as f64 / (n_psi - 1) as f64;
    CertReport::new(
        "crucial_estimate",
        ParamsSnapshot::of(p),
        vec![
            GridAxis::new("delta", n_delta, delta_max / n_delta as f64, delta_max),
            GridAxis::new("psi", n_psi, lo, hi),
        ],
        worst.value,
        vec![delta, psi],
        0.0,
        start.elapsed().as_secs_f64(),
    )
}

/// Default crucial-estimate grid (512 x 4096).
pub const CRUCIAL_GRID: (usize, usize) = (512, 4096);

/// Largest grid-certified `d1 <= 1/4` (to 1e-3) such that the crucial
/// estimate stays positive on `(0, d1]`.
pub fn find_d1(p: &ProfileS) -> Result<f64, CertifyError> {
    let pred = |d: f64| certify_crucial_estimate(p, d, CRUCIAL_GRID.0, CRUCIAL_GRID.1).pass;
    if !pred(1e-4) {
        return Err(CertifyError::SearchFailed {
            which: "find_d1".into(),
            detail: "crucial estimate fails even at delta_max = 1e-4; profile construction is broken"
                .into(),
        });
    }
    if pred(0.25) {
        return Ok(0.25);
    }
    let (mut lo, mut hi) = (1e-4, 0.25);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

// ---------------------------------------------------------------------------
// Containment certification and the (eta1, d2, t_delta) searches
// ---------------------------------------------------------------------------

/// Deterministic boundary-biased sample of the closed domain: half the
/// samples sit exactly on the boundary torus family, half in the interior
/// with a cubic bias toward the boundary.
fn omega_closure_sample(p: &ProfileS, seed: u64, k: u64) -> PointCW {
    let beta = p.beta();
    let s = -beta + (PI + 2.0 * beta) * halton(seed, k, 0);
    let theta = 2.0 * PI * halton(seed, k, 1);
    let r = if k % 2 == 0 {
        1.0
    } else {
        1.0 - halton(seed, k, 2).powi(3)
    };
    let phase = 2.0 * PI * halton(seed, k, 3);
    PointCW::new(
        Complex64::from_polar((0.5 * s).exp(), phase),
        Complex64::from_polar(1.0, s) + Complex64::from_polar(r * p.sqrt_s(s), theta),
    )
}

/// Deterministic sample of the boundary of `D^(delta, eta)`, parameterized by
/// the rotation angle `gamma in [-beta_eta, pi + beta_eta]`, the disc phase,
/// and the `z`-phase.
fn disc_boundary_sample(
    sp: &SmoothedProfile,
    rp: &RotationParams,
    seed: u64,
    k: u64,
) -> PointCW {
    let be = sp.beta_eta();
    let g = -be + (PI + 2.0 * be) * halton(seed, k, 0);
    let theta = 2.0 * PI * halton(seed, k, 1);
    let phase = 2.0 * PI * halton(seed, k, 2);
    let s = (g - rp.delta() * FRAC_PI_2) / (1.0 - rp.delta());
    let w = Complex64::from_polar(1.0, g) - Complex64::new(0.0, rp.delta_tilde())
        + Complex64::from_polar(sp.sqrt_s_eta(g), theta);
    PointCW::new(Complex64::from_polar((0.5 * s).exp(), phase), w)
}

/// Two-sided containment check `closure(Omega) ⊆ D^(delta,eta) ⊆ Omega(eps)`
/// with `eps = rp.epsilon()`:
///
/// * side a — `sample_n` boundary-biased points of the closed domain must
///   satisfy `rho_delta_eta < 0` (margin `-rho_delta_eta`);
/// * side b — `sample_n` boundary points of `D^(delta,eta)` must satisfy
///   `distance_to_omega < eps` (margin `eps - distance`).
pub fn certify_containments(
    p: &ProfileS,
    sp: &SmoothedProfile,
    rp: &RotationParams,
    sample_n: usize,
    seed: u64,
) -> CertReport {
    let start = Instant::now();
    let eps = rp.epsilon();
    let worst = par_min(2 * sample_n, |i| {
        if i < sample_n {
            let pt = omega_closure_sample(p, seed, i as u64);
            -rho_delta_eta_raw(rp, sp, pt)
        } else {
            let pt = disc_boundary_sample(sp, rp, seed.wrapping_add(1), (i - sample_n) as u64);
            eps - geometry::distance_to_omega(p, pt)
        }
    });
    let side_a = par_min(sample_n, |i| {
        -rho_delta_eta_raw(rp, sp, omega_closure_sample(p, seed, i as u64))
    });
    let (family, index) = if worst.index < sample_n {
        (0.0, worst.index)
    } else {
        (1.0, worst.index - sample_n)
    };
    CertReport::new(
        "containments",
        ParamsSnapshot::of(p).with_smoothed(sp).with_rotation(rp),
        vec![
            GridAxis::new("family", 2, 0.0, 1.0),
            GridAxis::new("sample", sample_n, 0.0, (sample_n - 1) as f64),
        ],
        worst.value,
        vec![family, index as f64],
        0.0,
        start.elapsed().as_secs_f64(),
    )
    .with_extra("side_a_min_margin", side_a.value)
    .with_extra(
        "side_b_min_margin",
        if worst.index >= sample_n {
            worst.value
        } else {
            par_min(sample_n, |i| {
                eps - geometry::distance_to_omega(
                    p,
                    disc_boundary_sample(sp, rp, seed.wrapping_add(1), i as u64),
                )
            })
            .value
        },
    )
}

const SEARCH_SAMPLES: usize = 1_500;

/// Side-b-only predicate at a probe tilt: does `D^(delta_probe, eta)` stay
/// inside the `eps`-tube on a coarse sample?
fn side_b_holds(
    p: &ProfileS,
    sp: &SmoothedProfile,
    eps: f64,
    delta_probe: f64,
    seed: u64,
) -> bool {
    let rp = match RotationParams::new(eps, sp.eta(), delta_probe, 0.0) {
        Ok(rp) => rp,
        Err(_) => return false,
    };
    let worst = par_min(SEARCH_SAMPLES, |i| {
        let pt = disc_boundary_sample(sp, &rp, seed.wrapping_add(1), i as u64);
        eps - geometry::distance_to_omega(p, pt)
    });
    worst.value > 0.0
}

/// Largest `eta` (5% relative resolution) that both survives the smoothing
/// search and keeps `D^(delta, eta)` inside the `eps`-tube for small tilts.
pub fn find_eta1(p: &ProfileS, eps: f64, seed: u64) -> Result<f64, CertifyError> {
    const ETA_FLOOR: f64 = 1e-7;
    let pred = |eta: f64| match build_smoothed(p, eta) {
        Ok(sp) => side_b_holds(p, &sp, eps, 1e-6, seed),
        Err(_) => false,
    };
    let mut hi = 0.25;
    let mut lo = hi;
    loop {
        if pred(lo) {
            break;
        }
        hi = lo;
        lo *= 0.5;
        if lo < ETA_FLOOR {
            return Err(CertifyError::SearchFailed {
                which: "find_eta1".into(),
                detail: format!("no admissible eta above {ETA_FLOOR:e} (predicate: build_smoothed + side b)"),
            });
        }
    }
    if lo == hi {
        return Ok(lo);
    }
    while hi / lo > 1.05 {
        let mid = (lo * hi).sqrt();
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest tilt `delta` (5% relative resolution) for which the coarse
/// two-sided containment check passes at tube radius `eps`.
pub fn find_d2(
    p: &ProfileS,
    sp: &SmoothedProfile,
    eps: f64,
    seed: u64,
) -> Result<f64, CertifyError> {
    const D2_FLOOR: f64 = 1e-9;
    let pred = |delta: f64| match RotationParams::new(eps, sp.eta(), delta, 0.0) {
        Ok(rp) => certify_containments(p, sp, &rp, SEARCH_SAMPLES, seed).pass,
        Err(_) => false,
    };
    let mut hi = 0.25;
    let mut lo = hi;
    loop {
        if pred(lo) {
            break;
        }
        hi = lo;
        lo *= 0.5;
        if lo < D2_FLOOR {
            return Err(CertifyError::SearchFailed {
                which: "find_d2".into(),
                detail: format!("containment fails for every delta above {D2_FLOOR:e} at eps = {eps:e}"),
            });
        }
    }
    if lo == hi {
        return Ok(lo);
    }
    while hi / lo > 1.05 {
        let mid = (lo * hi).sqrt();
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Half of the certified minimum of the `t = 0` half-plane margin over the
/// closed domain; positive whenever the tilt is below `d1`.
///
/// The margin of a point with chart angle `psi` is bounded below by the
/// crucial-estimate expression at `psi` (with equality at the worst disc
/// position), so the sampled minimum is capped by a dense 1-D sweep of that
/// expression: sampling alone would overestimate the infimum near the flat
/// zone, where the bound degenerates quadratically in `delta`.
pub fn find_t_delta(
    p: &ProfileS,
    _sp: &SmoothedProfile,
    rp: &RotationParams,
    sample_n: usize,
    seed: u64,
) -> Result<f64, CertifyError> {
    let rp0 = rp.with_t(0.0)?;
    let sampled = par_min(sample_n, |i| {
        halfplane_margin_raw(&rp0, omega_closure_sample(p, seed, i as u64))
    });
    let beta = p.beta();
    let delta = rp0.delta();
    let n_psi = 8_192;
    let swept = par_min(n_psi, |j| {
        let psi = -beta + (PI + 2.0 * beta) * j as f64 / (n_psi - 1) as f64;
        halfplane_margin_lower_bound(p, delta, psi)
    });
    // The bound dips like tilt^6 just past the flat zone (at psi ~ -tilt and
    // its mirror); golden refinement localizes the dip that a uniform grid
    // cannot resolve.
    let step = (PI + 2.0 * beta) / (n_psi - 1) as f64;
    let around_argmin = {
        let psi0 = -beta + step * swept.index as f64;
        golden_min(
            |psi| halfplane_margin_lower_bound(p, delta, psi),
            (psi0 - step).max(-beta),
            (psi0 + step).min(PI + beta),
            100,
        )
    };
    let dip = golden_min(
        |psi| halfplane_margin_lower_bound(p, delta, psi),
        -0.5 * p.alpha(),
        0.0,
        100,
    );
    let worst = sampled
        .value
        .min(swept.value)
        .min(around_argmin)
        .min(dip);
    if worst <= 0.0 {
        return Err(CertifyError::SearchFailed {
            which: "find_t_delta".into(),
            detail: format!(
                "half-plane margin at t = 0 reaches {:e}; delta = {} is too large",
                worst,
                rp0.delta()
            ),
        });
    }
    Ok(0.5 * worst)
}

// ---------------------------------------------------------------------------
// Levi suite
// ---------------------------------------------------------------------------

const FD_CHECK_SAMPLES: usize = 1_000;
const FD_STEP: f64 = 1e-4;

/// Scaled Levi quantity `|z|^2 L / (1-delta)^2` of the disc defining
/// function at a boundary point, plus the pieces of the two case bounds.
fn disc_case_margins(
    sp: &SmoothedProfile,
    rp: &RotationParams,
    pt: PointCW,
) -> (f64, f64, CaseTag) {
    let gamma = rp.rotation_angle_raw(pt.z);
    let a = rp.derotated(pt);
    let se = sp.s_eta_eval(gamma);
    let d1 = sp.s_eta_deriv(gamma);
    let d2 = sp.s_eta_second(gamma);
    let scaled = se * (-d2 + 2.0 * a.re) + 2.0 * d1 * a.im + d1 * d1;
    if se <= 1.0 {
        let root = se.max(0.0).sqrt();
        let theta_cos = if root > 0.0 { (a.re - 1.0) / root } else { 0.0 };
        let bound = se * (1.0 - se + (theta_cos + root) * (theta_cos + root));
        // both: the chain inequality and nonnegativity of the bound itself
        let m1 = scaled - (bound - 1e-9);
        let m2 = bound + 1e-12;
        (m1.min(m2), bound, CaseTag::DiscLe1)
    } else {
        let w_tilt = (pt.w + Complex64::new(0.0, rp.delta_tilde())).norm();
        let headroom = 50.0 - w_tilt;
        let bound = 2.0 * d1.abs() * headroom;
        let m1 = scaled - (bound - 1e-9);
        (m1.min(headroom), bound, CaseTag::DiscGt1)
    }
}

/// Samples the boundary of `D^(delta,eta)` inside `H_0^(delta)` and the
/// boundary of `H_t^(delta)` (always inside `H_0` for `t > 0`), and certifies:
///
/// * `levi_disc >= -1e-9` at every disc sample, with the case-separated lower
///   bounds (theta-decomposition for `S_eta <= 1`, the `50`-headroom bound for
///   `S_eta > 1`);
/// * `levi_halfplane >= -1e-12`, equal to `(1-delta)^2 t / (4|z|^2)` up to
///   1e-12 relative (absolute floor 1e-14), at every half-plane sample;
/// * finite-difference defects `<= 1e-4` at step 1e-4 on the first 10^3
///   samples of each family.
///
/// All clause slacks are folded into `min_margin` (pass iff every clause is
/// strictly positive); raw minima are reported in `extras`.
pub fn certify_levi(
    p: &ProfileS,
    sp: &SmoothedProfile,
    rp: &RotationParams,
    sample_n: usize,
    seed: u64,
) -> CertReport {
    let start = Instant::now();
    let rp0 = rp.with_t(0.0).expect("t = 0 is always admissible");

    // Disc family: keep the first `sample_n` candidates inside H_0.
    let mut disc_pts = Vec::with_capacity(sample_n);
    let mut k = 0u64;
    while disc_pts.len() < sample_n {
        let pt = disc_boundary_sample(sp, rp, seed.wrapping_add(2), k);
        if halfplane_margin_raw(&rp0, pt) > 0.0 {
            disc_pts.push(pt);
        }
        k += 1;
    }

    let tol_disc = -1e-9;
    let disc_levi = par_min(sample_n, |i| {
        levi_disc(rp, sp, disc_pts[i]).unwrap_or(f64::NEG_INFINITY)
    });
    let case_worst = par_min(sample_n, |i| disc_case_margins(sp, rp, disc_pts[i]).0);
    let le1_count = disc_pts
        .par_iter()
        .filter(|&&pt| disc_case_margins(sp, rp, pt).2 == CaseTag::DiscLe1)
        .count();

    // Half-plane family: boundary Re(A) = t, sampled over chart angle,
    // imaginary part and z-phase.
    let beta = p.beta();
    let hp_point = |k: u64| {
        let s = -beta - 1.0 + (PI + 2.0 * beta + 2.0) * halton(seed.wrapping_add(3), k, 0);
        let y = -3.0 + 6.0 * halton(seed.wrapping_add(3), k, 1);
        let phase = 2.0 * PI * halton(seed.wrapping_add(3), k, 2);
        let z = Complex64::from_polar((0.5 * s).exp(), phase);
        let gamma = rp.rotation_angle_raw(z);
        let w = Complex64::new(rp.t(), y) * Complex64::from_polar(1.0, gamma)
            - Complex64::new(0.0, rp.delta_tilde());
        PointCW::new(z, w)
    };
    let tol_hp = -1e-12;
    let hp_levi = par_min(sample_n, |i| {
        levi_halfplane(rp, hp_point(i as u64)).unwrap_or(f64::NEG_INFINITY)
    });
    let om = 1.0 - rp.delta();
    let hp_eq = par_min(sample_n, |i| {
        let pt = hp_point(i as u64);
        let formula = om * om * rp.t() / (4.0 * pt.z.norm_sqr());
        let diff = (levi_halfplane(rp, pt).unwrap_or(f64::NAN) - formula).abs();
        (1e-12 * formula.abs()).max(1e-14) - diff
    });

    // Finite-difference defects on the leading samples of both families. Disc
    // samples are taken away from the mollifier ramp: the g-quotient switches
    // over a scale far below the FD step there, so a step-1e-4 Hessian cannot
    // see the closed-form curvature (the cross-check targets the Levi algebra,
    // which the ramp-free zones exercise in full).
    let ramp_lo = PI + 0.25 * sp.gamma() - 1e-3;
    let ramp_hi = PI + 0.75 * sp.gamma() + 1e-3;
    let fd_disc_pts: Vec<PointCW> = disc_pts
        .iter()
        .copied()
        .filter(|pt| {
            let u = FRAC_PI_2 + (rp.rotation_angle_raw(pt.z) - FRAC_PI_2).abs();
            !(ramp_lo..=ramp_hi).contains(&u)
        })
        .take(FD_CHECK_SAMPLES.min(sample_n))
        .collect();
    let fd_disc = par_max(fd_disc_pts.len(), |i| {
        let pt = fd_disc_pts[i];
        let an = levi_disc(rp, sp, pt).unwrap_or(f64::NAN);
        let fd = levi_fd_check(DefiningFn::Disc, rp, sp, pt, FD_STEP).unwrap_or(f64::NAN);
        (an - fd).abs()
    });
    let fd_n = FD_CHECK_SAMPLES.min(sample_n);
    let fd_hp = par_max(fd_n, |i| {
        let pt = hp_point(i as u64);
        let an = levi_halfplane(rp, pt).unwrap_or(f64::NAN);
        let fd = levi_fd_check(DefiningFn::Halfplane, rp, sp, pt, FD_STEP).unwrap_or(f64::NAN);
        (an - fd).abs()
    });

    let clauses = [
        disc_levi.value - tol_disc,
        case_worst.value,
        hp_levi.value - tol_hp,
        hp_eq.value,
        1e-4 - fd_disc.value,
        1e-5 - fd_hp.value,
    ];
    let min_margin = clauses.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let argmin = vec![disc_levi.index as f64, hp_levi.index as f64];

    CertReport::new(
        "levi_suite",
        ParamsSnapshot::of(p).with_smoothed(sp).with_rotation(rp),
        vec![
            GridAxis::new("disc_sample", sample_n, 0.0, (sample_n - 1) as f64),
            GridAxis::new("halfplane_sample", sample_n, 0.0, (sample_n - 1) as f64),
        ],
        min_margin,
        argmin,
        0.0,
        start.elapsed().as_secs_f64(),
    )
    .with_extra("disc_levi_min", disc_levi.value)
    .with_extra("disc_case_margin_min", case_worst.value)
    .with_extra("disc_case_le1_fraction", le1_count as f64 / sample_n as f64)
    .with_extra("hp_levi_min", hp_levi.value)
    .with_extra("hp_equality_margin_min", hp_eq.value)
    .with_extra("fd_max_defect_disc", fd_disc.value)
    .with_extra("fd_max_defect_halfplane", fd_hp.value)
}

// ---------------------------------------------------------------------------
// The section-5 identity grid
// ---------------------------------------------------------------------------

/// `M(t, y) = cos(c)(cos(ty) - cos(y)) + sin(c)(sin(ty) + sin((1-t)y) - sin(y))`
/// with `c = t*pi/(2(1-t))`.
pub fn m_fn(t: f64, y: f64) -> f64 {
    let c = t * PI / (2.0 * (1.0 - t));
    c.cos() * ((t * y).cos() - y.cos())
        + c.sin() * ((t * y).sin() + ((1.0 - t) * y).sin() - y.sin())
}

/// `M(t, y)` in product form:
/// `cos(ty) - cos(y) = 2 sin((1+t)y/2) sin((1-t)y/2)` and
/// `sin(ty) + sin((1-t)y) - sin(y) = 4 sin(ty/2) sin((1-t)y/2) sin(y/2)`.
/// No cancellation, so values as small as the underflow threshold are exact
/// to relative rounding; used where `M` collapses like `y^2` near `y = 0`.
fn m_fn_stable(t: f64, y: f64) -> f64 {
    let c = t * PI / (2.0 * (1.0 - t));
    let a = (0.5 * (1.0 + t) * y).sin();
    let b = (0.5 * (1.0 - t) * y).sin();
    let d = (0.5 * t * y).sin();
    let e = (0.5 * y).sin();
    c.cos() * 2.0 * a * b + c.sin() * 4.0 * d * b * e
}

/// Cancellation-free evaluation of the crucial-estimate expression, which
/// lower-bounds the `t = 0` half-plane margin of every point of the closure
/// with chart angle `psi`. Zone by zone:
///
/// * flat zone `[0, pi]` (`sqrt(S) = 1`): `cos(x) - 1` written as
///   `-2 sin^2(x/2)`;
/// * round-off collar (`pi < psi <= pi + alpha/2` and its mirror): the exact
///   decomposition `g(psi - pi) + M(delta, phi(delta, pi - psi))`, all terms
///   nonnegative products — this is where the direct expression suffers total
///   cancellation (the true value collapses like `tilt^6`);
/// * elsewhere: the direct expression (slack is macroscopic there).
pub(crate) fn halfplane_margin_lower_bound(p: &ProfileS, delta: f64, psi: f64) -> f64 {
    // the expression is symmetric under psi -> pi - psi; reflect into
    // (-inf, pi/2]
    let psi = FRAC_PI_2 - (psi - FRAC_PI_2).abs();
    let tilt = delta * PI / (2.0 * (1.0 - delta));
    let bend = delta * (FRAC_PI_2 - psi);
    if psi >= 0.0 {
        // sqrt(S) = 1 on the reflected range [0, pi/2]
        let half = 0.5 * bend;
        -2.0 * half.sin() * half.sin() + (psi + bend).sin() * tilt.sin()
    } else if psi >= -0.5 * p.alpha() {
        g_eval(-psi) + m_fn_stable(delta, phi_fn(delta, psi))
    } else {
        crucial_expr(p, delta, psi)
    }
}

/// `phi(t, x) = x + t*pi/(2(1-t))`.
pub fn phi_fn(t: f64, x: f64) -> f64 {
    x + t * PI / (2.0 * (1.0 - t))
}

/// Verifies, on an open grid of `(delta, psi) in (0, d1) x (-alpha/2, 0)`:
/// the exact identity
/// `g(-psi) + M(delta, phi(delta, psi)) = crucial_expr(delta, psi)` to 1e-12,
/// positivity of `M(delta, phi(delta, psi))`, and `M(delta, 0) = 0`.
pub fn m_phi_identity_check(
    p: &ProfileS,
    d1: f64,
    n_delta: usize,
    n_psi: usize,
) -> CertReport {
    let start = Instant::now();
    let alpha = p.alpha();
    let worst = par_min(n_delta * n_psi, |i| {
        let di = i / n_psi;
        let pj = i % n_psi;
        let delta = d1 * (di + 1) as f64 / (n_delta + 1) as f64;
        let psi = -0.5 * alpha + 0.5 * alpha * (pj + 1) as f64 / (n_psi + 1) as f64;
        let m = m_fn(delta, phi_fn(delta, psi));
        let lhs = g_eval(-psi) + m;
        let rhs = crucial_expr(p, delta, psi);
        let identity_margin = 1e-12 - (lhs - rhs).abs();
        identity_margin.min(m)
    });
    let zero_worst = par_min(n_delta, |di| {
        let delta = d1 * (di + 1) as f64 / (n_delta + 1) as f64;
        1e-15 - m_fn(delta, 0.0).abs()
    });
    let max_disc = par_max(n_delta * n_psi, |i| {
        let di = i / n_psi;
        let pj = i % n_psi;
        let delta = d1 * (di + 1) as f64 / (n_delta + 1) as f64;
        let psi = -0.5 * alpha + 0.5 * alpha * (pj + 1) as f64 / (n_psi + 1) as f64;
        (g_eval(-psi) + m_fn(delta, phi_fn(delta, psi)) - crucial_expr(p, delta, psi)).abs()
    });
    let delta = d1 * ((worst.index / n_psi) + 1) as f64 / (n_delta + 1) as f64;
    let psi = -0.5 * alpha + 0.5 * alpha * ((worst.index % n_psi) + 1) as f64 / (n_psi + 1) as f64;
    CertReport::new(
        "m_phi_identity",
        ParamsSnapshot::of(p),
        vec![
            GridAxis::new("delta", n_delta, 0.0, d1),
            GridAxis::new("psi", n_psi, -0.5 * alpha, 0.0),
        ],
        worst.value.min(zero_worst.value),
        vec![delta, psi],
        0.0,
        start.elapsed().as_secs_f64(),
    )
    .with_extra("max_identity_discrepancy", max_disc.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> ProfileS {
        ProfileS::builtin().unwrap()
    }

    #[test]
    fn x_epsilon_values() {
        let p = profile();
        // closed-form inverse pair at the un-gated helper: eps = 2 e^{-10}
        assert!((x_epsilon_raw(2.0 * (-10.0f64).exp()) - (PI + 0.1)).abs() < 1e-13);
        // gated: eps = 1e-8, oracle 1/ln(2e8) in 40-digit arithmetic
        let x = x_epsilon(&p, 1e-8).unwrap();
        assert!((x - PI - 0.05231814390866004).abs() < 1e-15);
        let u = x - PI;
        assert!((2.0 * g_eval(u) / 1e-8 - 1.0).abs() < 1e-13);
        // out-of-range radii are rejected (eps0 ~ 5.6e-7)
        assert!(matches!(
            x_epsilon(&p, 1e-3),
            Err(CertifyError::EpsOutOfRange { .. })
        ));
        assert!(x_epsilon(&p, 0.0).is_err());
    }

    #[test]
    fn witness_point_values() {
        let p = profile();
        let pe = witness_point(&p, 1e-8).unwrap();
        assert!((pe.z.re - (0.25 * PI).exp()).abs() < 1e-15 && pe.z.im == 0.0);
        // sin(x_eps) is small negative; ln|z|^2 = pi/2 by construction
        assert!((pe.w.im + 0.05229427974072787).abs() < 1e-14);
        assert!((pe.z.norm_sqr().ln() - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn crucial_expr_spot_values() {
        let p = profile();
        // psi = pi/2: expression collapses to delta_tilde
        for delta in [0.05, 0.1, 0.2] {
            let tilt = (delta * PI / (2.0 * (1.0 - delta))).sin();
            assert!((crucial_expr(&p, delta, FRAC_PI_2) - tilt).abs() < 1e-15);
        }
        // oracle at (0.1, 0): cos(0.05 pi) - 1 + sin(0.05 pi) sin(pi/18)
        assert!((crucial_expr(&p, 0.1, 0.0) - 0.014852900373674941).abs() < 1e-15);
        // reflection symmetry through pi/2 is exact for the sqrt(S) term
        for (delta, psi) in [(0.1, -0.3), (0.2, 0.4), (0.07, 1.1)] {
            let a = crucial_expr(&p, delta, psi);
            let b = crucial_expr(&p, delta, PI - psi);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn stable_margin_bound_matches_direct_expression() {
        let p = profile();
        for delta in [0.2, 0.05, 0.01, 1e-4] {
            for j in 0..400 {
                let psi = -p.beta() + (PI + 2.0 * p.beta()) * j as f64 / 399.0;
                let a = crucial_expr(&p, delta, psi);
                let b = halfplane_margin_lower_bound(&p, delta, psi);
                assert!(
                    (a - b).abs() < 1e-12,
                    "delta = {delta}, psi = {psi}: direct {a} vs stable {b}"
                );
            }
        }
        // in the collapsed regime the stable form stays strictly positive
        // where the direct form is pure rounding noise
        for delta in [1e-5, 1e-6] {
            let dip = golden_min(
                |psi| halfplane_margin_lower_bound(&p, delta, psi),
                -0.5 * p.alpha(),
                0.0,
                100,
            );
            assert!(dip > 0.0, "delta = {delta}: dip = {dip:e}");
        }
    }

    #[test]
    fn m_phi_basics() {
        assert_eq!(phi_fn(0.5, 0.0), FRAC_PI_2);
        for t in [0.01, 0.2, 0.49] {
            assert_eq!(m_fn(t, 0.0), 0.0);
        }
    }

    #[test]
    fn crucial_estimate_coarse_pass() {
        let p = profile();
        let rep = certify_crucial_estimate(&p, 0.2, 48, 512);
        assert!(rep.pass, "min margin {} at {:?}", rep.min_margin, rep.argmin);
        // argmin reproduces the reported margin
        let re_eval = crucial_expr(&p, rep.argmin[0], rep.argmin[1]);
        assert!((re_eval - rep.min_margin).abs() < 1e-12);
    }

    #[test]
    fn annuli_coarse_pass() {
        let p = profile();
        let rep = certify_annuli(&p, 1e-7, 64).unwrap();
        assert!(rep.pass, "min margin {}", rep.min_margin);
        assert!(rep.extras["bottom_max_distance"] <= 1e-12);
        // circle margins retain at least half the tube radius
        assert!(rep.extras["circle_min_margin"] > 0.45e-7);
    }

    #[test]
    fn lipschitz_bound_holds_on_random_points() {
        let p = profile();
        let wc = lipschitz_constants(&p, 0.25, 20_000).unwrap();
        assert!(wc.lip_l > 0.0);
        // d(pt, Omega) >= min(lip_radius, rho(pt)/lip_L) spot check
        for k in 0..300u64 {
            let pt = PointCW::from_parts(
                0.3 + 2.5 * halton(5, k, 0),
                -1.2 + 2.4 * halton(5, k, 1),
                -2.5 + 5.0 * halton(5, k, 2),
                -2.5 + 5.0 * halton(5, k, 3),
            );
            if pt.z.norm_sqr() == 0.0 {
                continue;
            }
            let bound = wc.lip_radius.min(rho_raw(&p, pt) / wc.lip_l);
            let d = geometry::distance_to_omega(&p, pt);
            assert!(
                d >= bound - 1e-9,
                "point {k}: d = {d}, bound = {bound}"
            );
        }
    }

    #[test]
    fn witness_table_divergence() {
        let p = profile();
        let wc = lipschitz_constants(&p, 0.25, 20_000).unwrap();
        let eps_list = [1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12];
        let table = witness_table(&p, &wc, &eps_list).unwrap();
        assert_eq!(table.rows.len(), 6);
        // oracle for the first row: (1/ln(2e7)) / 1e-7
        assert!((table.rows[0].ratios[0] - 5.948400186839057e5).abs() < 1.0);
        // rho(p_eps) stays >= x_eps - pi (checked inside, re-assert here)
        for row in &table.rows {
            assert!(row.rho_witness >= row.x_eps_minus_pi);
        }
    }
}

//! Property-level checks of the radius profiles: exact reflection symmetry,
//! grid concavity, derivative consistency, and the smoothed-profile sandwich
//! and curvature-domination invariants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use wormdom::profiles::*;

fn profile() -> ProfileS {
    ProfileS::builtin().unwrap()
}

/// Random offsets on the 2^-49 dyadic grid: pi/2 is a multiple of 2^-49, so
/// `pi/2 + x` and `pi/2 - x` are exact floating-point reflections of each
/// other and the structural symmetry must reproduce bit-identical values.
fn dyadic_offsets(n: usize, span: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let scale = 2f64.powi(-49);
    let max = (span / scale) as u64;
    (0..n)
        .map(|_| rng.gen_range(0..=max) as f64 * scale)
        .collect()
}

#[test]
fn symmetry_is_exact() {
    let p = profile();
    let sp = build_smoothed(&p, 5e-5).unwrap();
    for x in dyadic_offsets(100_000, FRAC_PI_2 + p.beta() + 1.0) {
        let a = FRAC_PI_2 + x;
        let b = FRAC_PI_2 - x;
        assert_eq!(p.s_eval(a).to_bits(), p.s_eval(b).to_bits(), "x = {x}");
        assert_eq!(
            sp.s_eta_eval(a).to_bits(),
            sp.s_eta_eval(b).to_bits(),
            "x = {x}"
        );
    }
}

#[test]
fn concavity_on_spacing_grid() {
    let p = profile();
    let sp = build_smoothed(&p, 5e-5).unwrap();
    let lo = -p.beta() - 1.0;
    let hi = PI + p.beta() + 1.0;
    let n = ((hi - lo) / 1e-3).ceil() as usize;
    let h = (hi - lo) / n as f64;
    for i in 1..n {
        let x = lo + i as f64 * h;
        let dd = (p.s_eval(x + h) - 2.0 * p.s_eval(x) + p.s_eval(x - h)) / (h * h);
        assert!(dd <= 1e-6, "S at x = {x}: divided difference {dd}");
        let dd =
            (sp.s_eta_eval(x + h) - 2.0 * sp.s_eta_eval(x) + sp.s_eta_eval(x - h)) / (h * h);
        assert!(dd <= 1e-6, "S_eta at x = {x}: divided difference {dd}");
    }
}

#[test]
fn derivatives_consistent_with_differences() {
    let p = profile();
    let sp = build_smoothed(&p, 5e-5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-5;
    let mut checked = 0;
    while checked < 2_000 {
        let x: f64 = rng.gen_range(-p.beta() - 1.0..PI + p.beta() + 1.0);
        // away from the C^{1,1} junctions at 0 and pi
        if x.abs() < 0.02 || (x - PI).abs() < 0.02 {
            continue;
        }
        checked += 1;
        let fd = (p.s_eval(x + h) - p.s_eval(x - h)) / (2.0 * h);
        let an = p.s_deriv(x);
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "S' at {x}");
        let fd2 = (p.s_eval(x + h) - 2.0 * p.s_eval(x) + p.s_eval(x - h)) / (h * h);
        let an2 = p.s_second(x);
        assert!((fd2 - an2).abs() <= 1e-4 * an2.abs().max(1.0), "S'' at {x}");
        let fd = (sp.s_eta_eval(x + h) - sp.s_eta_eval(x - h)) / (2.0 * h);
        let an = sp.s_eta_deriv(x);
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "S_eta' at {x}");
    }
}

#[test]
fn sandwich_and_factor_100_at_10k() {
    let p = profile();
    for eta in [5e-5, 1e-5] {
        let sp = build_smoothed(&p, eta).unwrap();
        let chk = validate_smoothed(&sp, 10_000);
        assert!(chk.ok(), "eta = {eta}: {chk:?}");
        // spot: the sandwich really pins S_eta between the stated shifts
        for i in 0..10_000 {
            let x = -2.0 + 7.3 * i as f64 / 9_999.0;
            let s = p.s_eval(x);
            let se = sp.s_eta_eval(x);
            assert!(se >= s + 0.5 * eta && se <= s + 1.5 * eta, "x = {x}");
        }
    }
}

#[test]
fn g_flatness_dominates_powers() {
    for k in 1..=8 {
        assert!(g_eval(1e-2) / 1e-2f64.powi(k) < 1e-10);
    }
}

#[test]
fn smoothed_profile_examples() {
    let p = profile();
    let sp = build_smoothed(&p, 1e-5).unwrap();
    // S_eta(x_eta) = 1 within 1e-10, quadrature-oracle re-evaluation
    let integrand = |t: f64| p.s_deriv(t) * smooth_step_eval(sp.gamma(), t).unwrap();
    let oracle = 1.0 + sp.eta()
        + wormdom::quad::adaptive_simpson(
            &integrand,
            PI + 0.25 * sp.gamma(),
            sp.x_eta(),
            1e-12,
        )
        .unwrap();
    assert!((oracle - 1.0).abs() < 1e-10);
    assert!((sp.s_eta_eval(sp.x_eta()) - 1.0).abs() < 1e-10);
}

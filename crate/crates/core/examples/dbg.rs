use std::time::Instant;
use wormdom::certify::*;
use wormdom::geometry::*;
use wormdom::profiles::*;
use num_complex::Complex64;

fn main() {
    let t0 = Instant::now();
    let p = ProfileS::builtin().unwrap();
    println!("profile build: {:?} (beta = {})", t0.elapsed(), p.beta());

    let t0 = Instant::now();
    let pt = PointCW::new(Complex64::new(1.9, 0.4), Complex64::new(1.4, -2.0));
    let mut acc = 0.0;
    for _ in 0..1000 {
        acc += distance_to_omega(&p, pt);
    }
    println!("distance x1000: {:?} (d = {})", t0.elapsed(), acc / 1000.0);

    let t0 = Instant::now();
    let d1 = find_d1(&p).unwrap();
    println!("find_d1: {:?} -> d1 = {}", t0.elapsed(), d1);

    let t0 = Instant::now();
    let rep = certify_crucial_estimate(&p, d1, 512, 4096);
    println!("crucial 512x4096: {:?} margin {:e} at {:?} pass={}", t0.elapsed(), rep.min_margin, rep.argmin, rep.pass);

    let eps = 0.1;
    let t0 = Instant::now();
    let eta1 = find_eta1(&p, eps, 0).unwrap();
    println!("find_eta1(0.1): {:?} -> {:e}", t0.elapsed(), eta1);

    let eta = 0.5 * eta1;
    let t0 = Instant::now();
    let sp = build_smoothed(&p, eta).unwrap();
    println!("build_smoothed({eta:e}): {:?} gamma={:e} x_eta-pi={:e} beta_eta={}", t0.elapsed(), sp.gamma(), sp.x_eta() - std::f64::consts::PI, sp.beta_eta());

    let t0 = Instant::now();
    let d2 = find_d2(&p, &sp, eps, 0).unwrap();
    println!("find_d2: {:?} -> {:e}", t0.elapsed(), d2);

    let delta = 0.5 * d1.min(d2);
    let rp = RotationParams::new(eps, eta, delta, 0.0).unwrap();
    let t0 = Instant::now();
    let t_delta = find_t_delta(&p, &sp, &rp, 100_000, 0).unwrap();
    println!("find_t_delta: {:?} -> {:e}", t0.elapsed(), t_delta);

    let rp = RotationParams::new(eps, eta, delta, 0.5 * t_delta).unwrap();
    let t0 = Instant::now();
    let rep = certify_containments(&p, &sp, &rp, 20_000, 0);
    println!("containment 2e4/side: {:?} margin {:e} pass={} extras={:?}", t0.elapsed(), rep.min_margin, rep.pass, rep.extras);

    let t0 = Instant::now();
    let rep = certify_levi(&p, &sp, &rp, 20_000, 0);
    println!("levi 2e4/family: {:?} margin {:e} pass={} extras={:?}", t0.elapsed(), rep.min_margin, rep.pass, rep.extras);

    let t0 = Instant::now();
    let rep = m_phi_identity_check(&p, d1, 256, 256);
    println!("m_phi 256x256: {:?} margin {:e} pass={} extras={:?}", t0.elapsed(), rep.min_margin, rep.pass, rep.extras);

    let t0 = Instant::now();
    let rep = certify_annuli(&p, 1e-7, 256).unwrap();
    println!("annuli 256: {:?} margin {:e} pass={}", t0.elapsed(), rep.min_margin, rep.pass);

    let t0 = Instant::now();
    let wc = lipschitz_constants(&p, 0.25, 20_000).unwrap();
    let table = witness_table(&p, &wc, &[1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12]).unwrap();
    println!("witness: {:?} lipL={} rows ok, d(p_eps={:e})", t0.elapsed(), wc.lip_l, table.rows[0].dist_witness);
}

//! The plasmon mode of the reference wire against oracles that share no code
//! with the solver.

use std::f64::consts::PI;

use num_complex::Complex64;

use nvwire::coupling::tm_denominator;
use nvwire::materials::DrudeParameters;
use nvwire::mode::{dispersion_residual, mode_fields, solve_fundamental_mode, WireGeometry};

const WL: f64 = 700e-9;

fn reference_wire() -> WireGeometry {
    WireGeometry::with_drude(27.5e-9, &DrudeParameters::silver_default(), WL, 3.0).unwrap()
}

/// `I_ν(z)` by its power series.
fn series_i(nu: i32, z: Complex64) -> Complex64 {
    let mut term = (z / 2.0).powi(nu);
    for k in 1..=nu {
        term /= k as f64;
    }
    let mut sum = term;
    let q = z * z / 4.0;
    for k in 1..60usize {
        term = term * q / (k * (k + nu as usize)) as f64;
        sum += term;
    }
    sum
}

/// `K_ν(x) = ∫₀^∞ exp(−x cosh t) cosh(νt) dt`, trapezoid rule.
fn integral_k(nu: f64, x: f64) -> f64 {
    let h = 1e-3;
    let mut sum = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let v = (-x * f64::cosh(t)).exp() * f64::cosh(nu * t);
        if v < 1e-300 {
            break;
        }
        sum += v;
        t += h;
    }
    sum * h
}

#[test]
fn dispersion_residual_matches_direct_formula() {
    let g = reference_wire();
    let k0 = 2.0 * PI / WL;
    let n = Complex64::new(2.0, 0.0);
    let r = g.radius;
    let km = k0 * (n * n - g.eps_metal).sqrt();
    let k1 = k0 * (n * n - 3.0).sqrt();
    let x1 = (k1 * r).re;
    let direct = g.eps_metal / km * series_i(1, km * r) / series_i(0, km * r) + 3.0 / k1 * integral_k(1.0, x1) / integral_k(0.0, x1);
    let d = dispersion_residual(n, &g, WL).unwrap();
    assert!((d - direct).norm() / direct.norm() < 1e-12, "{d} vs {direct}");
    let frozen = Complex64::new(5.516_370_210_984_863e-7, 3.494_199_209_751_025e-9);
    assert!((d - frozen).norm() / frozen.norm() < 1e-12);
}

/// Net winding of `f` around the rectangle `[lo, hi]`, from phase increments.
fn winding(f: &dyn Fn(Complex64) -> Complex64, lo: Complex64, hi: Complex64, samples: usize) -> i64 {
    let corners = [lo, Complex64::new(hi.re, lo.im), hi, Complex64::new(lo.re, hi.im)];
    let mut turn = 0.0;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let mut prev = f(a);
        for k in 1..=samples {
            let v = f(a + (b - a) * (k as f64 / samples as f64));
            turn += (v / prev).arg();
            prev = v;
        }
    }
    (turn / (2.0 * PI)).round() as i64
}

#[test]
fn effective_index_matches_grid_scan() {
    let g = reference_wire();
    let f = |z: Complex64| dispersion_residual(z, &g, WL).unwrap();
    let lo = Complex64::new(3f64.sqrt() * 1.001, 0.0);
    let hi = Complex64::new(6.0, 1.0);
    let (nx, ny) = (40, 20);
    let cell = Complex64::new((hi.re - lo.re) / nx as f64, (hi.im - lo.im) / ny as f64);
    let mut hits = Vec::new();
    for ix in 0..nx {
        for iy in 0..ny {
            let a = lo + Complex64::new(cell.re * ix as f64, cell.im * iy as f64);
            let w = winding(&f, a, a + cell, 64);
            if w != 0 {
                hits.push((a, a + cell, w));
            }
        }
    }
    assert_eq!(hits.len(), 1, "{hits:?}");
    assert_eq!(hits[0].2, 1);
    let (mut a, mut b) = (hits[0].0, hits[0].1);
    while (b - a).norm() > 1e-11 {
        let m = (a + b) / 2.0;
        let quarters = [
            (a, m),
            (Complex64::new(m.re, a.im), Complex64::new(b.re, m.im)),
            (Complex64::new(a.re, m.im), Complex64::new(m.re, b.im)),
            (m, b),
        ];
        (a, b) = quarters.into_iter().find(|&(p, q)| winding(&f, p, q, 32) == 1).expect("root stays enclosed");
    }
    let scan = (a + b) / 2.0;
    let mode = solve_fundamental_mode(&g, WL).unwrap();
    assert!((mode.n_eff - scan).norm() < 1e-8, "{} vs {scan}", mode.n_eff);
    let frozen = Complex64::new(2.817_625_691_668_741, 0.017_625_205_986_492);
    assert!((mode.n_eff - frozen).norm() < 1e-12);
    assert!((mode.propagation_length / 3.160_486_755_4e-6 - 1.0).abs() < 1e-9);
}

#[test]
fn radial_field_dominates_at_the_surface() {
    let mode = solve_fundamental_mode(&reference_wire(), WL).unwrap();
    let f = mode_fields(&mode, 27.5e-9 * (1.0 + 1e-9)).unwrap();
    assert!(f.e_z.norm() / f.e_r.norm() < 0.5);
    assert_eq!(f.e_phi.norm(), 0.0);
}

#[test]
fn scattering_denominator_vanishes_on_the_mode() {
    for radius_nm in [15.0, 25.0, 27.5, 31.5, 40.0] {
        let g = WireGeometry::with_drude(radius_nm * 1e-9, &DrudeParameters::silver_default(), WL, 3.0).unwrap();
        let mode = solve_fundamental_mode(&g, WL).unwrap();
        let k0 = 2.0 * PI / 700.0;
        let at = |n: Complex64| tm_denominator(n * k0, radius_nm, k0, 3.0, g.eps_metal);
        // relative to the size of the denominator one percent off the pole
        let scale = at(mode.n_eff * 1.01).norm();
        assert!(at(mode.n_eff).norm() < 1e-8 * scale, "R = {radius_nm} nm");
    }
}

#[test]
fn confinement_grows_as_wire_thins() {
    let index = |r: f64| {
        let g = WireGeometry::with_drude(r * 1e-9, &DrudeParameters::silver_default(), WL, 3.0).unwrap();
        solve_fundamental_mode(&g, WL).unwrap().n_eff.re
    };
    let radii = [20.0, 22.5, 25.0, 27.5, 30.0, 32.5, 35.0];
    for w in radii.windows(2) {
        assert!(index(w[0]) > index(w[1]));
    }
}

//! Truncation convergence and physical orderings of the rate enhancement at
//! the five measured wire systems.

use nvwire::coupling::{
    bundled_records, gamma_plasmon, total_enhancement_with, total_rate_enhancement, total_rate_enhancement_with, CouplingConfig, EmitterConfig,
    OrderPolicy, Orientation,
};
use nvwire::materials::DrudeParameters;
use nvwire::mode::WireGeometry;

const WL: f64 = 700e-9;

fn systems() -> Vec<(WireGeometry, f64)> {
    let drude = DrudeParameters::silver_default();
    bundled_records()
        .iter()
        .map(|r| {
            let g = WireGeometry::with_drude(0.5 * r.wire_diameter_nm * 1e-9, &drude, WL, 3.0).unwrap();
            (g, r.diamond_height_nm * 1e-9)
        })
        .collect()
}

fn emitter(distance: f64, orientation: Orientation) -> EmitterConfig {
    EmitterConfig::new(distance, orientation, WL, 3.0).unwrap()
}

#[test]
fn doubling_truncations_moves_total_below_a_permille() {
    for (g, h) in systems() {
        let e = emitter(h, Orientation::Radial);
        let base = total_rate_enhancement(&g, &e).unwrap();
        let doubled = CouplingConfig {
            orders: OrderPolicy {
                start: (2 * base.max_order).min(200),
                ..OrderPolicy::default()
            },
            cutoff_scale: 2.0,
            ..CouplingConfig::default()
        };
        let fine = total_rate_enhancement_with(&g, &e, &doubled).unwrap();
        assert!(fine.max_order >= (2 * base.max_order).min(200));
        let change = (fine.total / base.total - 1.0).abs();
        assert!(change < 1e-3, "R = {:e}, h = {h:e}: {} -> {} ({change:e})", g.radius, base.total, fine.total);
    }
}

#[test]
fn radial_dipoles_couple_more_strongly_than_axial() {
    for (g, h) in systems() {
        let total = |o| total_enhancement_with(&g, &emitter(h, o), &CouplingConfig::default()).unwrap();
        let (radial, axial) = (total(Orientation::Radial), total(Orientation::Axial));
        assert!(radial > axial, "R = {:e}, h = {h:e}: {radial} vs {axial}", g.radius);
    }
}

#[test]
fn far_from_the_wire_nothing_changes() {
    for (g, _) in systems() {
        let far = total_rate_enhancement(&g, &emitter(2.0 * WL, Orientation::Radial)).unwrap();
        assert!((0.9..=1.1).contains(&far.total), "{}", far.total);
        assert!(gamma_plasmon(&g, &emitter(5.0 * WL, Orientation::Radial)).unwrap() < 1e-3);
    }
}

#[test]
fn plasmon_channel_decays_with_distance() {
    let (g, _) = systems().remove(0);
    let mut last = f64::INFINITY;
    for d in [5.0, 10.0, 20.0, 40.0, 80.0, 160.0] {
        let pl = gamma_plasmon(&g, &emitter(d * 1e-9, Orientation::Radial)).unwrap();
        assert!(pl < last);
        last = pl;
    }
}

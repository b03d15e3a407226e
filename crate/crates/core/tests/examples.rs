//! Every example in `examples/` runs to completion.

mod bessel_functions {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bessel_functions.rs"));
}

mod quadrature {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/quadrature.rs"));
}

mod complex_roots {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/complex_roots.rs"));
}

mod drude_fit {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/drude_fit.rs"));
}

mod plasmon_mode {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/plasmon_mode.rs"));
}

mod rate_enhancement {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rate_enhancement.rs"));
}

mod enhancement_map {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/enhancement_map.rs"));
}

mod measured_systems {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/measured_systems.rs"));
}

mod lifetime_measurement {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/lifetime_measurement.rs"));
}

mod antibunching {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/antibunching.rs"));
}

mod command_line {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/command_line.rs"));
}

#[test]
fn bessel_functions_example_runs() {
    bessel_functions::run_example().expect("bessel_functions example");
}

#[test]
fn quadrature_example_runs() {
    quadrature::run_example().expect("quadrature example");
}

#[test]
fn complex_roots_example_runs() {
    complex_roots::run_example().expect("complex_roots example");
}

#[test]
fn drude_fit_example_runs() {
    drude_fit::run_example().expect("drude_fit example");
}

#[test]
fn plasmon_mode_example_runs() {
    plasmon_mode::run_example().expect("plasmon_mode example");
}

#[test]
fn rate_enhancement_example_runs() {
    rate_enhancement::run_example().expect("rate_enhancement example");
}

#[test]
fn enhancement_map_example_runs() {
    enhancement_map::run_example().expect("enhancement_map example");
}

#[test]
fn measured_systems_example_runs() {
    measured_systems::run_example().expect("measured_systems example");
}

#[test]
fn lifetime_measurement_example_runs() {
    lifetime_measurement::run_example().expect("lifetime_measurement example");
}

#[test]
fn antibunching_example_runs() {
    antibunching::run_example().expect("antibunching example");
}

#[test]
fn command_line_example_runs() {
    command_line::run_example().expect("command_line example");
}

// Fundamental plasmon mode of a silver wire in a dielectric, and how it
// approaches the flat-interface plasmon as the wire grows.

use nvwire::materials::DrudeParameters;
use nvwire::mode::{flat_interface_index, mode_fields, solve_fundamental_mode, WireGeometry};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let drude = DrudeParameters::silver_default();
    let wavelength = 700e-9;
    for radius_nm in [15.0, 27.5, 40.0, 500.0] {
        let g = WireGeometry::with_drude(radius_nm / 1e9, &drude, wavelength, 3.0)?;
        let m = solve_fundamental_mode(&g, wavelength)?;
        println!(
            "R = {radius_nm:5.1} nm  n_eff = {:.6}  L = {:.3} um",
            m.n_eff,
            m.propagation_length * 1e6
        );
    }
    let g = WireGeometry::with_drude(27.5e-9, &drude, wavelength, 3.0)?;
    println!("flat interface: {:.6}", flat_interface_index(g.eps_metal, 3.0));

    let m = solve_fundamental_mode(&g, wavelength)?;
    for r_nm in [10.0, 27.5, 40.0, 80.0] {
        let f = mode_fields(&m, r_nm / 1e9)?;
        println!("r = {r_nm:5.1} nm  |E_r| = {:.4}  |E_z| = {:.4}", f.e_r.norm(), f.e_z.norm());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("mode example");
}

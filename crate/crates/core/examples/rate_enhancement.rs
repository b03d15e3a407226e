// Decay-rate enhancement of a dipole near the wire, split into the plasmon,
// radiative and non-radiative channels.

use nvwire::coupling::{total_rate_enhancement, EmitterConfig, Orientation};
use nvwire::materials::DrudeParameters;
use nvwire::mode::WireGeometry;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let wavelength = 700e-9;
    let g = WireGeometry::with_drude(27.5e-9, &DrudeParameters::silver_default(), wavelength, 3.0)?;
    for orientation in [Orientation::Radial, Orientation::Axial, Orientation::Azimuthal] {
        let e = EmitterConfig::new(27e-9, orientation, wavelength, 3.0)?;
        let r = total_rate_enhancement(&g, &e)?;
        println!(
            "{:9}  total {:.4}  plasmon {:.4}  radiative {:.4}  absorbed {:.4}  beta {:.3}",
            orientation.name(),
            r.total,
            r.gamma_pl,
            r.gamma_rad,
            r.gamma_nr,
            r.beta
        );
    }
    for d_nm in [5.0, 10.0, 20.0, 40.0] {
        let e = EmitterConfig::new(d_nm / 1e9, Orientation::Radial, wavelength, 3.0)?;
        let r = total_rate_enhancement(&g, &e)?;
        println!("radial at {d_nm:4.1} nm: total {:.4}  beta {:.3}", r.total, r.beta);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("rate example");
}

// Cylinder and modified Bessel functions at complex arguments, the building
// blocks of the wire fields.

use num_complex::Complex64;
use nvwire::numerics::{bessel_cyl, bessel_mod};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // inside a silver wire the argument is almost purely imaginary
    let z = Complex64::new(0.05, 2.3);
    for m in 0..3 {
        let c = bessel_cyl(m, z)?;
        let k = bessel_mod(m, z)?;
        println!("m={m}  J={:.6}  H1={:.6}  K={:.6}", c.j, c.h1, k.k);
        // Wronskian J H1' - J' H1 = 2i / (pi z)
        let w = c.j * c.dh1 - c.dj * c.h1;
        let expected = Complex64::new(0.0, 2.0) / (std::f64::consts::PI * z);
        println!("     Wronskian error {:.2e}", (w - expected).norm() / expected.norm());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("bessel example");
}

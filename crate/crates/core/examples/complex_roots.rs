// Certified complex root finding: count zeros by the argument principle,
// then polish with Newton steps.

use num_complex::Complex64;
use nvwire::numerics::roots::find_complex_root_report;
use nvwire::numerics::{winding_number, RootRegion};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // z^3 - 1 has one root per third of the plane
    let mut f = |z: Complex64| Ok(z * z * z - 1.0);
    let all = RootRegion::from_bounds((-2.0, 2.0), (-2.0, 2.0))?;
    println!("zeros in [-2,2]^2: {}", winding_number(&mut f, &all)?.count);

    let upper = RootRegion::from_bounds((-1.0, 0.0), (0.5, 1.2))?;
    let r = find_complex_root_report(&mut f, &upper, 1e-13)?;
    println!("root {:.12}  scaled residual {:.1e}  newton steps {}", r.root, r.scaled_residual, r.newton_steps);

    let empty = RootRegion::from_bounds((0.2, 0.4), (0.2, 0.4))?;
    match find_complex_root_report(&mut f, &empty, 1e-13) {
        Err(e) => println!("empty box: {e}"),
        Ok(r) => println!("unexpected root {}", r.root),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("roots example");
}

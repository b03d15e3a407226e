// Adaptive Gauss-Kronrod quadrature on finite and semi-infinite ranges.

use num_complex::Complex64;
use nvwire::numerics::{integrate, integrate_half_line, integrate_half_line_oscillatory, QuadratureConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = QuadratureConfig::new(1e-10, 1e-14, 200)?;

    let e = integrate(|x| Complex64::new(x.sqrt(), 0.0), 0.0, 1.0, &cfg)?;
    println!("int_0^1 sqrt(x) = {:.12} (error {:.1e}, {} calls)", e.value.re, e.error, e.evaluations);

    let e = integrate_half_line(|x| Complex64::new((-x * x).exp(), 0.0), &cfg)?;
    println!("int_0^inf exp(-x^2) = {:.12}, sqrt(pi)/2 = {:.12}", e.value.re, std::f64::consts::PI.sqrt() / 2.0);

    // sin(x)/x decays only like 1/x; the panel sums are extrapolated
    let sinc = |x: f64| Complex64::new(if x == 0.0 { 1.0 } else { x.sin() / x }, 0.0);
    let e = integrate_half_line_oscillatory(sinc, std::f64::consts::PI, &cfg)?;
    println!("int_0^inf sin(x)/x = {:.10}, pi/2 = {:.10}", e.value.re, std::f64::consts::FRAC_PI_2);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("quadrature example");
}

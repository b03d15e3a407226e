// Drude fit to tabulated silver permittivity, and the permittivity it
// predicts across the visible.

use nvwire::materials::{fit_drude, OpticalConstantTable};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let table = OpticalConstantTable::bundled_silver();
    let fit = fit_drude(&table, (600.0, 800.0))?;
    let p = fit.params;
    println!(
        "eps_inf = {:.4}  hbar*omega_p = {:.4} eV  hbar*gamma = {:.5} eV",
        p.eps_inf,
        p.hbar_omega_p_ev(),
        p.hbar_gamma_ev()
    );
    for (wl, r) in &fit.residuals {
        println!("  {wl:7.2} nm  relative residual {r:.2e}");
    }
    for wl in [550.0, 650.0, 700.0, 750.0] {
        println!("  eps({wl} nm) = {:.3}", p.epsilon(wl));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("drude example");
}

// Pulsed excitation of a two-level emitter, a start-stop lifetime
// histogram, and a Poisson maximum-likelihood lifetime fit.

use nvwire::photon::{
    fit_lifetime, histogram_start_stop, simulate_stream, LifetimeWindow, PumpMode, Sync, ThreeLevelModel,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rep_rate = 5.05e6;
    let model = ThreeLevelModel::new(1e12, 1.0 / 17.3e-9, 0.0, 0.0, 0.2, 50.0)?;
    let mode = PumpMode::Pulsed {
        rep_rate,
        pulse_width: 4.6e-12,
    };
    let stream = simulate_stream(&model, mode, 0.2, 11)?;
    println!("{} detections in 0.2 s", stream.events.len());

    let period_ps = mode.period_ps().unwrap_or(1e12 / rep_rate);
    let h = histogram_start_stop(&stream, Sync::PulseTrain { period_ps }, 200, period_ps as u64)?;
    let fit = fit_lifetime(&h, &LifetimeWindow::for_rep_rate(rep_rate))?;
    println!(
        "tau = {:.3} +/- {:.3} ns (true 17.3 ns), chi2/dof = {:.3}, {} bins",
        fit.tau_ns, fit.tau_stderr_ns, fit.chi2_per_dof, fit.bins_used
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("lifetime example");
}

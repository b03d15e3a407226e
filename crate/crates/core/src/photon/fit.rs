//! Lifetime and intensity-correlation fits of delay histograms.

use super::histogram::Histogram;
use crate::error::{Error, Result};
use crate::numerics::lm::{invert, levenberg_marquardt, solve, LmOptions};

/// Reference bulk lifetime of the emitter, ns. Informational only.
pub const TAU_BULK_NS: f64 = 12.0;

/// Default g² normalization window `|τ| ∈ [300, 500]` ns.
pub const G2_NORMALIZATION_NS: (f64, f64) = (300.0, 500.0);

/// Fit range of a lifetime histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeWindow {
    /// gap between the histogram peak and the first fitted bin, ns
    pub start_after_peak_ns: f64,
    /// last fitted delay, ns; `None` fits to the end of the histogram
    pub end_ns: Option<f64>,
}

impl Default for LifetimeWindow {
    fn default() -> Self {
        Self {
            start_after_peak_ns: 1.0,
            end_ns: None,
        }
    }
}

impl LifetimeWindow {
    /// Ends the fit at 80 % of the pulse period.
    pub fn for_rep_rate(rep_rate_hz: f64) -> Self {
        Self {
            end_ns: Some(0.8e9 / rep_rate_hz),
            ..Self::default()
        }
    }
}

/// `counts ≈ amplitude · exp(−t/τ) + offset` with `t` the delay in ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeFitResult {
    pub tau_ns: f64,
    pub tau_stderr_ns: f64,
    /// counts per bin at zero delay
    pub amplitude: f64,
    pub amplitude_stderr: f64,
    /// counts per bin
    pub offset: f64,
    pub offset_stderr: f64,
    /// Pearson χ² per degree of freedom
    pub chi2_per_dof: f64,
    pub bins_used: usize,
    pub iterations: usize,
}

struct Poisson<'a> {
    t: &'a [f64],
    n: &'a [f64],
}

impl Poisson<'_> {
    fn mu(&self, p: &[f64], t: f64) -> f64 {
        p[0] * (-t / p[1]).exp() + p[2]
    }

    fn nll(&self, p: &[f64]) -> f64 {
        if !(p[1] > 0.0) {
            return f64::INFINITY;
        }
        let mut s = 0.0;
        for (&t, &n) in self.t.iter().zip(self.n) {
            let mu = self.mu(p, t);
            if !(mu > 0.0) {
                return f64::INFINITY;
            }
            s += mu - if n > 0.0 { n * mu.ln() } else { 0.0 };
        }
        s
    }

    /// Gradient and Hessian of the negative log-likelihood.
    fn derivatives(&self, p: &[f64]) -> ([f64; 3], [f64; 9]) {
        let (a, tau) = (p[0], p[1]);
        let mut g = [0.0; 3];
        let mut h = [0.0; 9];
        for (&t, &n) in self.t.iter().zip(self.n) {
            let e = (-t / tau).exp();
            let mu = a * e + p[2];
            let d = [e, a * e * t / (tau * tau), 1.0];
            let w = 1.0 - n / mu;
            let v = n / (mu * mu);
            let d_a_tau = e * t / (tau * tau);
            let d_tau_tau = a * e * (t * t / tau.powi(4) - 2.0 * t / tau.powi(3));
            for i in 0..3 {
                g[i] += w * d[i];
                for j in 0..3 {
                    h[i * 3 + j] += v * d[i] * d[j];
                }
            }
            h[1] += w * d_a_tau;
            h[3] += w * d_a_tau;
            h[4] += w * d_tau_tau;
        }
        (g, h)
    }
}

/// Poisson maximum-likelihood fit of a single exponential plus offset.
///
/// Standard errors come from the inverse of the observed information (the
/// Hessian of the negative log-likelihood) at the optimum.
pub fn fit_lifetime(histogram: &Histogram, window: &LifetimeWindow) -> Result<LifetimeFitResult> {
    if histogram.is_empty() || histogram.total() == 0.0 {
        return Err(Error::DegenerateHistogram("histogram has no counts".into()));
    }
    let centers = histogram.centers_ns();
    let peak = histogram
        .counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let start = centers[peak] + window.start_after_peak_ns;
    let end = window.end_ns.unwrap_or(f64::INFINITY);
    let (t, n): (Vec<f64>, Vec<f64>) = centers
        .iter()
        .zip(&histogram.counts)
        .filter(|(&c, _)| c >= start && c <= end)
        .map(|(&c, &k)| (c, k))
        .unzip();
    let filled = n.iter().filter(|&&k| k > 0.0).count();
    if filled < 10 {
        return Err(Error::DegenerateHistogram(format!(
            "{filled} non-empty bins in the fit window [{start:.3}, {end:.3}] ns, need 10"
        )));
    }
    let problem = Poisson { t: &t, n: &n };

    // start: offset from the tail, slope from a weighted log-linear fit
    let tail = (n.len() / 10).max(1);
    let offset0 = 0.5 * n[n.len() - tail..].iter().sum::<f64>() / tail as f64;
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&ti, &ni) in t.iter().zip(&n) {
        let y = ni - offset0;
        if y > 0.0 {
            let (w, ly) = (y, y.ln());
            sw += w;
            sx += w * ti;
            sy += w * ly;
            sxx += w * ti * ti;
            sxy += w * ti * ly;
        }
    }
    let slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    let span = t[t.len() - 1] - t[0];
    let tau0 = if slope < 0.0 && slope.is_finite() { -1.0 / slope } else { 0.3 * span };
    let amp0 = ((sy - slope * sx) / sw).exp().max(1e-3);
    let mut p = [amp0, tau0.clamp(1e-3 * span, 10.0 * span), offset0];

    let mut nll = problem.nll(&p);
    if !nll.is_finite() {
        p[2] = 0.0;
        nll = problem.nll(&p);
    }
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < 500 {
        iterations += 1;
        let (g, h) = problem.derivatives(&p);
        let mut accepted = false;
        for _ in 0..40 {
            let mut a = h;
            for i in 0..3 {
                a[i * 3 + i] += lambda * h[i * 3 + i].abs().max(1e-300);
            }
            let Some(step) = solve(&a, &[-g[0], -g[1], -g[2]]) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_nll = problem.nll(&trial);
            if trial_nll <= nll {
                let small = (step[1] / p[1]).abs() < 1e-12
                    && step[0].abs() <= 1e-10 * p[0].abs().max(1e-300)
                    && step[2].abs() <= 1e-10 * p[0].abs().max(1e-300);
                let flat = nll - trial_nll <= 1e-15 * nll.abs();
                p = trial;
                nll = trial_nll;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                converged = small || (flat && lambda <= 1e-9);
                break;
            }
            lambda *= 10.0;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::FitNotConverged(format!(
            "lifetime fit stopped after {iterations} iterations at tau = {:.6} ns, amplitude = {:.6}, offset = {:.6}",
            p[1], p[0], p[2]
        )));
    }
    let (_, h) = problem.derivatives(&p);
    let cov = invert(&h, 3).ok_or_else(|| {
        Error::FitNotConverged(format!("singular information matrix at tau = {:.6} ns", p[1]))
    })?;
    let se = |i: usize| cov[i * 3 + i].max(0.0).sqrt();
    let pearson: f64 = t
        .iter()
        .zip(&n)
        .map(|(&ti, &ni)| {
            let mu = problem.mu(&p, ti);
            (ni - mu).powi(2) / mu
        })
        .sum();
    Ok(LifetimeFitResult {
        tau_ns: p[1],
        tau_stderr_ns: se(1),
        amplitude: p[0],
        amplitude_stderr: se(0),
        offset: p[2],
        offset_stderr: se(2),
        chi2_per_dof: pearson / (t.len() - 3) as f64,
        bins_used: t.len(),
        iterations,
    })
}

/// Three-level correlation shape with background mixing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Parameters {
    /// bunching amplitude
    pub a: f64,
    /// antibunching time, ns
    pub tau1_ns: f64,
    /// bunching (shelving) time, ns
    pub tau2_ns: f64,
    /// signal fraction `S/(S + B)` of the detected light
    pub rho: f64,
}

/// `g²(τ)` observed through background of signal fraction `ρ`:
/// `1 + ρ² (g²_emitter(τ) − 1)` with
/// `g²_emitter = 1 − (1 + a) e^{−|τ|/τ₁} + a e^{−|τ|/τ₂}`.
pub fn g2_model(tau_ns: f64, p: &G2Parameters) -> f64 {
    let x = tau_ns.abs();
    let e1 = (-x / p.tau1_ns).exp();
    let e2 = (-x / p.tau2_ns).exp();
    // grouped so that τ = 0 gives exactly −1
    let emitter_minus_one = p.a * (e2 - e1) - e1;
    1.0 + p.rho * p.rho * emitter_minus_one
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2FitResult {
    pub a: f64,
    pub a_stderr: f64,
    pub tau1_ns: f64,
    pub tau1_stderr_ns: f64,
    pub tau2_ns: f64,
    pub tau2_stderr_ns: f64,
    /// fitted `g²(0) = 1 − ρ²`
    pub g2_zero: f64,
    pub g2_zero_stderr: f64,
    /// `1 − ρ`
    pub background_fraction: f64,
    pub chi2_per_dof: f64,
    /// `g²(0) < 0.5`
    pub single_emitter: bool,
}

impl G2FitResult {
    pub fn parameters(&self) -> G2Parameters {
        G2Parameters {
            a: self.a,
            tau1_ns: self.tau1_ns,
            tau2_ns: self.tau2_ns,
            rho: 1.0 - self.background_fraction,
        }
    }
}

/// Fits [`g2_model`] to a correlation histogram.
///
/// Counts are divided by their mean over the wings `|τ| ∈ window`; the model
/// is divided by its own mean over the same bins, so slow bunching that has
/// not fully decayed in the wings does not bias the fit. `ρ` is confined to
/// `[0, 1]`, so `g²(0)` lies in `[0, 1]`.
/// The antibunching time is bounded below by the bin width, the shortest
/// time the histogram resolves.
pub fn fit_g2(histogram: &Histogram, normalization_window_ns: (f64, f64)) -> Result<G2FitResult> {
    let (lo, hi) = normalization_window_ns;
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!("bad normalization window [{lo}, {hi}] ns")));
    }
    let tau = histogram.centers_ns();
    let wing: Vec<usize> = (0..tau.len()).filter(|&i| tau[i].abs() >= lo && tau[i].abs() <= hi).collect();
    let wing_counts: f64 = wing.iter().map(|&i| histogram.counts[i]).sum();
    if wing.len() < 10 || wing_counts <= 0.0 {
        return Err(Error::InsufficientData(format!(
            "{} bins with {wing_counts} counts in the wings [{lo}, {hi}] ns",
            wing.len()
        )));
    }
    let norm = wing_counts / wing.len() as f64;
    let y: Vec<f64> = histogram.counts.iter().map(|c| c / norm).collect();
    let sigma: Vec<f64> = histogram.counts.iter().map(|c| c.max(1.0).sqrt() / norm).collect();

    // start point from the dip: depth and recovery time
    let zero = (0..tau.len())
        .min_by(|&i, &j| tau[i].abs().total_cmp(&tau[j].abs()))
        .expect("non-empty");
    let near: Vec<usize> = (zero.saturating_sub(1)..(zero + 2).min(tau.len())).collect();
    let y0 = near.iter().map(|&i| y[i]).sum::<f64>() / near.len() as f64;
    let depth = (1.0 - y0).clamp(0.02, 1.0);
    let recovered = 1.0 - depth / std::f64::consts::E;
    let tau1_guess = (zero..tau.len())
        .find(|&i| tau[i] > 0.0 && y[i] >= recovered)
        .map(|i| tau[i])
        .unwrap_or(histogram.bin_width_ps as f64 * 1e-3)
        .max(0.5 * histogram.bin_width_ps as f64 * 1e-3);
    let tau1_min = histogram.bin_width_ps as f64 * 1e-3;
    let reach = tau.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if reach < 5.0 * tau1_guess {
        return Err(Error::InsufficientData(format!(
            "histogram reaches {reach:.4} ns, less than five antibunching times ({tau1_guess:.4} ns)"
        )));
    }

    // internal parameters: observed bunching b = ρ²a = p₀², τ₁ = τ_min + e^{p₁},
    // τ₂ = τ₁ + e^{p₂}, ρ² = sin² p₃; b stays finite as ρ → 0
    let unpack = |p: &[f64]| {
        let tau1 = tau1_min + p[1].exp();
        (p[0] * p[0], tau1, tau1 + p[2].exp(), p[3].sin().powi(2))
    };
    let residuals = |p: &[f64]| -> Result<Vec<f64>> {
        let (b, tau1, tau2, rho2) = unpack(p);
        let raw = |t: f64| {
            let (e1, e2) = ((-t.abs() / tau1).exp(), (-t.abs() / tau2).exp());
            1.0 - rho2 * e1 + b * (e2 - e1)
        };
        let model_norm = wing.iter().map(|&i| raw(tau[i])).sum::<f64>() / wing.len() as f64;
        if !(model_norm > 0.0) || !model_norm.is_finite() {
            return Err(Error::Range("model wing mean is not positive".into()));
        }
        Ok((0..tau.len()).map(|i| (y[i] - raw(tau[i]) / model_norm) / sigma[i]).collect())
    };

    let opts = LmOptions {
        f_tol: 1e-12,
        ..LmOptions::default()
    };
    let mut best: Option<crate::numerics::lm::LmResult> = None;
    let tau1_start = tau1_guess.max(1.1 * tau1_min);
    for tau2_factor in [5.0, 30.0] {
        for a0 in [0.2f64, 1.0] {
            let x0 = [
                (a0 * depth).sqrt(),
                (tau1_start - tau1_min).ln(),
                (tau1_start * (tau2_factor - 1.0)).ln(),
                depth.min(0.99).sqrt().asin(),
            ];
            match levenberg_marquardt(residuals, &x0, &opts) {
                Ok(fit) => {
                    if best.as_ref().is_none_or(|b| fit.cost < b.cost) {
                        best = Some(fit);
                    }
                }
                Err(e) => log::debug!("g2 fit from {x0:?}: {e}"),
            }
        }
    }
    let fit = best.ok_or_else(|| Error::FitNotConverged("g2 fit failed from every start point".into()))?;
    let p = &fit.params;
    let dof = (tau.len() - 4) as f64;
    let chi2_per_dof = fit.cost / dof;
    // covariance of the internal parameters, inflated when χ²/dof > 1;
    // NaN where the fit is degenerate
    let cov = fit.inverse_normal_matrix();
    let stderr = |grad: [f64; 4]| -> f64 {
        let Some(c) = cov.as_ref() else { return f64::NAN };
        let mut v = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                v += grad[i] * c[i * 4 + j] * grad[j];
            }
        }
        (v * chi2_per_dof.max(1.0)).sqrt()
    };
    let (b, tau1, tau2, rho2) = unpack(p);
    let (e1, e2, s2) = (p[1].exp(), p[2].exp(), (2.0 * p[3]).sin());
    let a = if rho2 > 0.0 { b / rho2 } else { 0.0 };
    let g2_zero = 1.0 - rho2;
    Ok(G2FitResult {
        a,
        a_stderr: stderr([2.0 * p[0] / rho2, 0.0, 0.0, -b * s2 / (rho2 * rho2)]),
        tau1_ns: tau1,
        tau1_stderr_ns: stderr([0.0, e1, 0.0, 0.0]),
        tau2_ns: tau2,
        tau2_stderr_ns: stderr([0.0, e1, e2, 0.0]),
        g2_zero,
        g2_zero_stderr: stderr([0.0, 0.0, 0.0, -s2]),
        background_fraction: 1.0 - rho2.sqrt(),
        chi2_per_dof,
        single_emitter: g2_zero < 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lifetime_histogram(tau: f64, amplitude: f64, offset: f64) -> Histogram {
        let mut h = Histogram::zeros(0, 200, 990);
        let centers = h.centers_ns();
        for (c, t) in h.counts.iter_mut().zip(centers) {
            *c = amplitude * (-t / tau).exp() + offset;
        }
        h
    }

    #[test]
    fn noiseless_lifetime_inverts_exactly() {
        let h = lifetime_histogram(17.3, 5000.0, 3.0);
        let fit = fit_lifetime(&h, &LifetimeWindow::for_rep_rate(5.05e6)).unwrap();
        assert!((fit.tau_ns / 17.3 - 1.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.offset - 3.0).abs() < 1e-5);
        assert!(fit.chi2_per_dof < 1e-10);
    }

    #[test]
    fn lifetime_window_starts_after_peak() {
        let mut h = lifetime_histogram(4.8, 2000.0, 1.0);
        // a pile-up spike in the first bin must not enter the fit
        h.counts[0] = 1e6;
        let fit = fit_lifetime(&h, &LifetimeWindow::default()).unwrap();
        assert!((fit.tau_ns / 4.8 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_histograms_rejected() {
        let h = Histogram::zeros(0, 200, 100);
        assert!(matches!(fit_lifetime(&h, &LifetimeWindow::default()), Err(Error::DegenerateHistogram(_))));
        let mut h = Histogram::zeros(0, 200, 100);
        h.counts[3] = 50.0;
        h.counts[20] = 3.0;
        assert!(matches!(fit_lifetime(&h, &LifetimeWindow::default()), Err(Error::DegenerateHistogram(_))));
    }

    #[test]
    fn g2_model_limits() {
        let p = G2Parameters {
            a: 0.7,
            tau1_ns: 10.0,
            tau2_ns: 200.0,
            rho: 1.0,
        };
        assert_eq!(g2_model(0.0, &p), 0.0);
        assert!((g2_model(1e5, &p) - 1.0).abs() < 1e-15);
        assert!((g2_model(-1e5, &p) - 1.0).abs() < 1e-15);
        let bunching = G2Parameters {
            a: 0.5,
            tau1_ns: 1.0,
            tau2_ns: 1000.0,
            rho: 1.0,
        };
        assert!(g2_model(20.0, &bunching) > 1.0);
    }

    fn sampled_g2(p: &G2Parameters, scale: f64) -> Histogram {
        let mut h = Histogram::zeros(-600_000, 1000, 1200);
        let centers = h.centers_ns();
        for (c, t) in h.counts.iter_mut().zip(centers) {
            *c = scale * g2_model(t, p);
        }
        h
    }

    #[test]
    fn noiseless_g2_inverts() {
        let truth = G2Parameters {
            a: 0.3,
            tau1_ns: 12.0,
            tau2_ns: 150.0,
            rho: 0.9,
        };
        let fit = fit_g2(&sampled_g2(&truth, 1000.0), G2_NORMALIZATION_NS).unwrap();
        let rel = |x: f64, y: f64| (x / y - 1.0).abs();
        assert!(rel(fit.a, 0.3) < 1e-4, "{fit:?}");
        assert!(rel(fit.tau1_ns, 12.0) < 1e-4);
        assert!(rel(fit.tau2_ns, 150.0) < 1e-4);
        assert!(rel(1.0 - fit.background_fraction, 0.9) < 1e-4);
        assert!((fit.g2_zero - (1.0 - 0.81)).abs() < 1e-4);
        assert!(fit.single_emitter);
    }

    #[test]
    fn flat_g2_is_not_single() {
        let mut h = Histogram::zeros(-600_000, 1000, 1200);
        h.counts.iter_mut().for_each(|c| *c = 400.0);
        let fit = fit_g2(&h, G2_NORMALIZATION_NS).unwrap();
        assert!((fit.g2_zero - 1.0).abs() < 1e-6, "{fit:?}");
        assert!(!fit.single_emitter);
    }

    #[test]
    fn g2_needs_wings() {
        let truth = G2Parameters {
            a: 0.3,
            tau1_ns: 12.0,
            tau2_ns: 150.0,
            rho: 0.9,
        };
        let mut h = sampled_g2(&truth, 100.0);
        h.bin_starts_ps = h.bin_starts_ps[400..800].to_vec();
        h.counts = h.counts[400..800].to_vec();
        assert!(matches!(fit_g2(&h, G2_NORMALIZATION_NS), Err(Error::InsufficientData(_))));
    }
}

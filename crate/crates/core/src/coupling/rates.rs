//! Decay-rate enhancement of a dipole next to the wire and its split into
//! plasmon, radiative and non-radiative channels.
//!
//! With `pref = 6π ε₁ / k₁³` the enhancement is
//! `1 + pref · Im ∫ p̂·G_sc(k_z)·p̂ dk_z` over the whole real line. The
//! integrand is even in `k_z`, so twice the half line is integrated:
//!
//! * `|k_z| < k₁` on the real axis (`k_z = k₁ cos t`): the radiative part;
//! * `|k_z| > k₁` on a path dipping below the real axis
//!   (`k_z = k₁ cosh s − iδ(1 − exp(−(s/s₁)²))`), which keeps clear of the
//!   sharp plasmon pole sitting just above the axis.
//!
//! The plasmon channel is `pref · Im(2πi Res)` at the `m = 0` TM pole, with
//! the residue from a trapezoidal contour integral around it; it is removed
//! from the `|k_z| > k₁` part to leave the non-radiative channel.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::green::{integrand, radial_wavenumber_outside, tm_denominator, OrderPolicy, Orientation, Setup};
use crate::error::{Error, Result};
use crate::materials::DrudeParameters;
use crate::mode::{solve_fundamental_mode, PlasmonMode, WireGeometry};
use crate::numerics::quadrature::{integrate, QuadratureConfig};
use crate::numerics::roots::{find_complex_root_report, RootRegion};

/// Position, orientation and wavelength of the emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterConfig {
    /// gap `d′` between wire surface and dipole, m
    pub distance_from_surface: f64,
    pub orientation: Orientation,
    /// m
    pub vacuum_wavelength: f64,
    pub eps_background: f64,
}

impl EmitterConfig {
    pub fn new(distance_from_surface: f64, orientation: Orientation, vacuum_wavelength: f64, eps_background: f64) -> Result<Self> {
        if !(distance_from_surface > 0.0) || !distance_from_surface.is_finite() {
            return Err(Error::InvalidInput(format!(
                "distance from surface must be positive, got {distance_from_surface} m"
            )));
        }
        if !(vacuum_wavelength > 0.0) || !vacuum_wavelength.is_finite() {
            return Err(Error::InvalidInput(format!("wavelength must be positive, got {vacuum_wavelength} m")));
        }
        if !(eps_background >= 1.0) {
            return Err(Error::InvalidInput(format!("eps_background must be >= 1, got {eps_background}")));
        }
        Ok(Self {
            distance_from_surface,
            orientation,
            vacuum_wavelength,
            eps_background,
        })
    }
}

/// Rates normalized to the emitter in the homogeneous background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    pub gamma_pl: f64,
    pub gamma_rad: f64,
    pub gamma_nr: f64,
    pub total: f64,
    pub beta: f64,
    /// guided-mode index used for the plasmon channel, if a mode exists
    pub n_eff: Option<Complex64>,
    /// highest angular order needed anywhere on the path
    pub max_order: usize,
    /// quadrature error bound propagated to `total`
    pub error_bound: f64,
}

/// Numerical controls of the rate computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub orders: OrderPolicy,
    /// relative tolerance of each `k_z` integral
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// multiplies the `k_z` cutoff `max(40/d′, 8k₁)`
    pub cutoff_scale: f64,
    /// trapezoidal points on the residue contour
    pub residue_points: usize,
    /// path depth `δ / k₁`
    pub path_depth: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            orders: OrderPolicy::default(),
            rel_tol: 1e-8,
            max_subdivisions: 4000,
            cutoff_scale: 1.0,
            residue_points: 64,
            path_depth: 0.25,
        }
    }
}

const PATH_WIDTH: f64 = 0.3;
const NEGATIVE_FLOOR: f64 = -1e-9;

fn setup_for(geometry: &WireGeometry, emitter: &EmitterConfig) -> Result<Setup> {
    if (geometry.eps_dielectric - emitter.eps_background).abs() > 1e-12 * emitter.eps_background {
        return Err(Error::InvalidInput(format!(
            "wire background eps {} differs from emitter background eps {}",
            geometry.eps_dielectric, emitter.eps_background
        )));
    }
    let wavelength_nm = emitter.vacuum_wavelength * 1e9;
    let radius = geometry.radius * 1e9;
    Ok(Setup {
        k0: 2.0 * PI / wavelength_nm,
        eps1: emitter.eps_background,
        eps2: geometry.eps_metal,
        radius,
        rho0: radius + emitter.distance_from_surface * 1e9,
        orientation: emitter.orientation,
    })
}

fn prefactor(setup: &Setup) -> f64 {
    6.0 * PI * setup.eps1 / setup.k1().powi(3)
}

struct PathIntegrals {
    radiative: Complex64,
    evanescent: Complex64,
    error: f64,
    max_order: usize,
}

fn path_integrals(setup: &Setup, config: &CouplingConfig) -> Result<PathIntegrals> {
    let k1 = setup.k1();
    let d = setup.rho0 - setup.radius;
    // absolute floor: 1e-12 in enhancement units
    let quad = QuadratureConfig::new(config.rel_tol, 0.5e-12 / prefactor(setup), config.max_subdivisions)?;
    let mut max_order = 0;
    let mut failure: Option<Error> = None;
    let mut eval = |kz: Complex64, jac: Complex64| -> Complex64 {
        if failure.is_some() {
            return Complex64::new(0.0, 0.0);
        }
        match integrand(setup, kz, &config.orders) {
            Ok(s) => {
                max_order = max_order.max(s.max_order);
                s.value * jac
            }
            Err(e) => {
                failure = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };

    let radiative = integrate(
        |t| eval(Complex64::new(k1 * t.cos(), 0.0), Complex64::new(k1 * t.sin(), 0.0)),
        0.0,
        PI / 2.0,
        &quad,
    );
    let delta = config.path_depth * k1;
    let path = |s: f64| {
        let g = (-(s / PATH_WIDTH).powi(2)).exp();
        let kz = Complex64::new(k1 * s.cosh(), -delta * (1.0 - g));
        let jac = Complex64::new(k1 * s.sinh(), -delta * (2.0 * s / (PATH_WIDTH * PATH_WIDTH)) * g);
        (kz, jac)
    };
    let cutoff = config.cutoff_scale * (40.0 / d).max(8.0 * k1);
    let s_max = (cutoff / k1).acosh();
    let evanescent = integrate(
        |s| {
            let (kz, jac) = path(s);
            eval(kz, jac)
        },
        0.0,
        s_max,
        &quad,
    );
    // beyond the cutoff the integrand decays like exp(−a k_z); integrate the
    // fitted exponential along the horizontal continuation of the path
    let (kz_end, _) = path(s_max);
    let f_end = eval(kz_end, Complex64::new(1.0, 0.0));
    let step = 0.05 * cutoff;
    let f_next = eval(kz_end + step, Complex64::new(1.0, 0.0));
    if let Some(e) = failure {
        return Err(e);
    }
    let radiative = radiative?;
    let evanescent = evanescent?;
    let rate = -(f_next / f_end).ln() / step;
    let tail = if f_end.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else if rate.re > 0.0 {
        f_end / rate
    } else {
        return Err(Error::Accuracy {
            estimate: evanescent.value,
            error_bound: f_end.norm() * cutoff,
        });
    };
    Ok(PathIntegrals {
        radiative: radiative.value,
        evanescent: evanescent.value + tail,
        error: radiative.error + evanescent.error + tail.norm(),
        max_order,
    })
}

/// Contour integral `∮ f dk_z = 2πi Res` of the `m = 0` integrand around `kp`.
fn residue_integral(setup: &Setup, kp: Complex64, config: &CouplingConfig) -> Result<Complex64> {
    let k1 = setup.k1();
    let radius = 0.3 * (kp.re - k1);
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("plasmon pole {kp} is not beyond the light line {k1}")));
    }
    let n = config.residue_points;
    let only_m0 = OrderPolicy {
        start: 0,
        tol: 0.0,
        max: 0,
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let theta = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let offset = Complex64::from_polar(radius, theta);
        let f = integrand(setup, kp + offset, &only_m0)?.value;
        sum += f * offset;
    }
    // (1/N) Σ f r e^{iθ} is the residue
    Ok(2.0 * PI * Complex64::i() * sum / n as f64)
}

/// Enhancement and channels for one emitter placement, default numerics.
pub fn total_rate_enhancement(geometry: &WireGeometry, emitter: &EmitterConfig) -> Result<RateBreakdown> {
    total_rate_enhancement_with(geometry, emitter, &CouplingConfig::default())
}

/// As [`total_rate_enhancement`] with explicit numerical controls.
pub fn total_rate_enhancement_with(
    geometry: &WireGeometry,
    emitter: &EmitterConfig,
    config: &CouplingConfig,
) -> Result<RateBreakdown> {
    let setup = setup_for(geometry, emitter)?;
    let mode = match solve_fundamental_mode(geometry, emitter.vacuum_wavelength) {
        Ok(m) => Some(m),
        Err(Error::NoMode(msg)) => {
            log::info!("no guided mode ({msg}); plasmon channel set to zero");
            None
        }
        Err(e) => return Err(e),
    };
    breakdown(&setup, mode.as_ref(), config)
}

/// As [`total_rate_enhancement_with`] with the guided mode supplied by the
/// caller (`None` when the wire guides nothing), so sweeps over the emitter
/// position can share one mode solve.
pub fn total_rate_enhancement_for_mode(
    geometry: &WireGeometry,
    emitter: &EmitterConfig,
    mode: Option<&PlasmonMode>,
    config: &CouplingConfig,
) -> Result<RateBreakdown> {
    let setup = setup_for(geometry, emitter)?;
    breakdown(&setup, mode, config)
}

fn breakdown(setup: &Setup, mode: Option<&PlasmonMode>, config: &CouplingConfig) -> Result<RateBreakdown> {
    let pref = prefactor(setup);
    let paths = path_integrals(setup, config)?;
    let gamma_rad = 1.0 + pref * 2.0 * paths.radiative.im;
    let evanescent = pref * 2.0 * paths.evanescent.im;
    let gamma_pl = match mode {
        Some(m) => pref * residue_integral(setup, m.n_eff * setup.k0, config)?.im,
        None => 0.0,
    };
    let gamma_nr = evanescent - gamma_pl;
    let total = gamma_rad + evanescent;
    let error_bound = pref * 2.0 * paths.error;
    let channels = [
        ("gamma_pl", clamp_channel("gamma_pl", gamma_pl, total)?),
        ("gamma_rad", clamp_channel("gamma_rad", gamma_rad, total)?),
        ("gamma_nr", clamp_channel("gamma_nr", gamma_nr, total)?),
    ];
    let [pl, rad, nr] = channels.map(|c| c.1);
    Ok(RateBreakdown {
        gamma_pl: pl,
        gamma_rad: rad,
        gamma_nr: nr,
        total,
        beta: (pl / total).clamp(0.0, 1.0),
        n_eff: mode.map(|m| m.n_eff),
        max_order: paths.max_order,
        error_bound,
    })
}

fn clamp_channel(name: &str, value: f64, total: f64) -> Result<f64> {
    if value >= 0.0 {
        return Ok(value);
    }
    if value >= NEGATIVE_FLOOR * total.abs().max(1.0) {
        log::warn!("{name} = {value:e} clamped to zero");
        return Ok(0.0);
    }
    Err(Error::Accuracy {
        estimate: Complex64::new(value, 0.0),
        error_bound: value.abs(),
    })
}

/// Total enhancement alone.
///
/// The total does not depend on how the evanescent part is split between the
/// plasmon and absorption channels, so it stays available where that split
/// fails its positivity check (thin lossy wires at intermediate distances).
pub fn total_enhancement_with(geometry: &WireGeometry, emitter: &EmitterConfig, config: &CouplingConfig) -> Result<f64> {
    let setup = setup_for(geometry, emitter)?;
    let pref = prefactor(&setup);
    let paths = path_integrals(&setup, config)?;
    // same operation order as the breakdown, so both give identical totals
    let gamma_rad = 1.0 + pref * 2.0 * paths.radiative.im;
    Ok(gamma_rad + pref * 2.0 * paths.evanescent.im)
}

/// The plasmon channel alone; a no-mode error when the wire guides nothing.
pub fn gamma_plasmon(geometry: &WireGeometry, emitter: &EmitterConfig) -> Result<f64> {
    gamma_plasmon_with(geometry, emitter, &CouplingConfig::default())
}

pub fn gamma_plasmon_with(geometry: &WireGeometry, emitter: &EmitterConfig, config: &CouplingConfig) -> Result<f64> {
    let setup = setup_for(geometry, emitter)?;
    let mode = solve_fundamental_mode(geometry, emitter.vacuum_wavelength)?;
    let value = prefactor(&setup) * residue_integral(&setup, mode.n_eff * setup.k0, config)?.im;
    clamp_channel("gamma_pl", value, 1.0)
}

/// Total enhancement averaged with uniform weight over `samples` wavelengths
/// spanning `band` (m), with the metal permittivity from `drude` at each.
pub fn band_averaged_total(
    radius: f64,
    drude: &DrudeParameters,
    emitter: &EmitterConfig,
    band: (f64, f64),
    samples: usize,
) -> Result<f64> {
    if samples < 2 || !(band.1 > band.0) || !(band.0 > 0.0) {
        return Err(Error::InvalidInput("band average needs an increasing band and >= 2 samples".into()));
    }
    let mut sum = 0.0;
    for i in 0..samples {
        let wl = band.0 + (band.1 - band.0) * i as f64 / (samples - 1) as f64;
        let geometry = WireGeometry::with_drude(radius, drude, wl, emitter.eps_background)?;
        let e = EmitterConfig {
            vacuum_wavelength: wl,
            ..*emitter
        };
        sum += total_rate_enhancement(&geometry, &e)?.total;
    }
    Ok(sum / samples as f64)
}

/// Zero of the `m = 0` TM scattering denominator near `guess` (an effective
/// index), found independently of the mode solver; returns `k_z / k₀`.
pub fn scattering_pole_index(geometry: &WireGeometry, wavelength: f64, guess: Complex64) -> Result<Complex64> {
    let wavelength_nm = wavelength * 1e9;
    let k0 = 2.0 * PI / wavelength_nm;
    let radius = geometry.radius * 1e9;
    let half = 0.05 * guess.norm();
    let region = RootRegion::new(guess, half, half.min(0.5 * guess.re - 0.5 * geometry.eps_dielectric.sqrt()))?;
    let mut f = |n: Complex64| {
        let v = tm_denominator(n * k0, radius, k0, geometry.eps_dielectric, geometry.eps_metal);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range(format!("TM denominator not finite at n = {n}")))
        }
    };
    Ok(find_complex_root_report(&mut f, &region, 1e-13)?.root)
}

/// Light-line check used by callers that build their own poles.
pub fn is_bound(k1: f64, kz: Complex64) -> bool {
    radial_wavenumber_outside(k1, kz).im > 0.0 && kz.re > k1
}

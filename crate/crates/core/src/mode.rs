//! The fundamental (m = 0, TM) surface-plasmon mode of a metal cylinder in a
//! uniform dielectric.
//!
//! Fields vary as `exp(i(k_z z − ωt))` with `k_z = n_eff k₀`. Inside the wire
//! the longitudinal field is `I₀(κ_m r)`, outside `K₀(κ₁ r)`, with
//! `κ_j = k₀ sqrt(n² − ε_j)` on the branch `Re κ ≥ 0` (and `Im κ ≥ 0` on a
//! tie). The mode condition is continuity of `H_φ` at the surface:
//!
//! ```text
//! D(n) = (ε_m/κ_m) I₁(κ_m R)/I₀(κ_m R) + (ε₁/κ₁) K₁(κ₁ R)/K₀(κ₁ R) = 0
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::materials::DrudeParameters;
use crate::numerics::bessel::{i_scaled_seq, k_scaled_seq};
use crate::numerics::roots::{find_complex_root_report, winding_number, RootRegion};

/// A metal cylinder of radius `radius` (m) in a dielectric background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireGeometry {
    pub radius: f64,
    pub eps_metal: Complex64,
    pub eps_dielectric: f64,
}

impl WireGeometry {
    pub fn new(radius: f64, eps_metal: Complex64, eps_dielectric: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius} m")));
        }
        if !(eps_dielectric >= 1.0) || !eps_dielectric.is_finite() {
            return Err(Error::InvalidInput(format!("eps_dielectric must be >= 1, got {eps_dielectric}")));
        }
        if !eps_metal.re.is_finite() || !eps_metal.im.is_finite() {
            return Err(Error::InvalidInput("eps_metal must be finite".into()));
        }
        Ok(Self {
            radius,
            eps_metal,
            eps_dielectric,
        })
    }

    /// Geometry with the metal permittivity taken from a Drude model.
    pub fn with_drude(radius: f64, drude: &DrudeParameters, wavelength: f64, eps_dielectric: f64) -> Result<Self> {
        Self::new(radius, drude.epsilon(wavelength * 1e9), eps_dielectric)
    }
}

/// Transverse decay constant `k₀ sqrt(n² − ε)` on the decaying branch.
pub fn transverse_wavenumber(k0: f64, n: Complex64, eps: Complex64) -> Complex64 {
    let mut s = (n * n - eps).sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        s = -s;
    }
    s * k0
}

/// Amplitude convention for sampled fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldNormalization {
    /// `E_z(r = R⁺) = 1`; `H` is given as `Z₀ H` so it shares the units of `E`.
    EzAtSurfaceUnity,
}

/// A solved guided mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmonMode {
    /// vacuum wavelength, m
    pub vacuum_wavelength: f64,
    pub geometry: WireGeometry,
    /// `k_z / k₀`
    pub n_eff: Complex64,
    /// power 1/e length, m; infinite for a lossless metal
    pub propagation_length: f64,
    pub field_normalization: FieldNormalization,
    /// `|D(n_eff)|` over the larger of its two addends
    pub relative_residual: f64,
    /// winding number of `D` around a small square centred on `n_eff`
    pub certified_winding: i64,
}

impl PlasmonMode {
    /// A mode with a given effective index and no solve; the residual and
    /// winding fields are left at zero.
    pub fn from_index(geometry: WireGeometry, vacuum_wavelength: f64, n_eff: Complex64) -> Self {
        let mut mode = Self {
            vacuum_wavelength,
            geometry,
            n_eff,
            propagation_length: 0.0,
            field_normalization: FieldNormalization::EzAtSurfaceUnity,
            relative_residual: 0.0,
            certified_winding: 0,
        };
        mode.propagation_length = propagation_length(&mode);
        mode
    }

    pub fn k0(&self) -> f64 {
        2.0 * PI / self.vacuum_wavelength
    }
}

/// Field components at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFieldSample {
    /// m
    pub r: f64,
    pub e_r: Complex64,
    pub e_phi: Complex64,
    pub e_z: Complex64,
    pub h_phi: Complex64,
}

/// The two addends of `D(n)`: metal side and dielectric side.
pub fn dispersion_terms(n: Complex64, geometry: &WireGeometry, wavelength: f64) -> Result<(Complex64, Complex64)> {
    let k0 = 2.0 * PI / wavelength;
    let eps1 = Complex64::new(geometry.eps_dielectric, 0.0);
    let km = transverse_wavenumber(k0, n, geometry.eps_metal);
    let k1 = transverse_wavenumber(k0, n, eps1);
    if km.norm() == 0.0 || k1.norm() == 0.0 {
        return Err(Error::Range(format!("trial index {n} sits on a branch point")));
    }
    let xm = km * geometry.radius;
    let x1 = k1 * geometry.radius;
    let is = i_scaled_seq(xm, 1);
    let ks = k_scaled_seq(x1, 1);
    let metal = geometry.eps_metal / km * (is[1] / is[0]);
    let dielectric = eps1 / k1 * (ks[1] / ks[0]);
    if !metal.re.is_finite() || !dielectric.re.is_finite() || !metal.im.is_finite() || !dielectric.im.is_finite() {
        return Err(Error::Range(format!("dispersion residual not finite at n = {n}")));
    }
    Ok((metal, dielectric))
}

/// `D(n)` for trial effective index `n`; `wavelength` in m.
pub fn dispersion_residual(n: Complex64, geometry: &WireGeometry, wavelength: f64) -> Result<Complex64> {
    let (a, b) = dispersion_terms(n, geometry, wavelength)?;
    Ok(a + b)
}

/// `|D(n)| / max(|addend₁|, |addend₂|)`.
pub fn relative_residual(n: Complex64, geometry: &WireGeometry, wavelength: f64) -> Result<f64> {
    let (a, b) = dispersion_terms(n, geometry, wavelength)?;
    Ok((a + b).norm() / a.norm().max(b.norm()))
}

/// Flat-interface plasmon index `sqrt(ε_m ε₁ / (ε_m + ε₁))`.
pub fn flat_interface_index(eps_metal: Complex64, eps_dielectric: f64) -> Complex64 {
    (eps_metal * eps_dielectric / (eps_metal + eps_dielectric)).sqrt()
}

const RESIDUAL_TARGET: f64 = 1e-10;

/// Solves for the fundamental mode; `wavelength` in m.
///
/// The search rectangle spans `Re n ∈ [1.001 sqrt(ε₁), 6]` and
/// `Im n ∈ [−0.05, 1]`; if it holds no zero, the real extent is widened to
/// 12 and then 24 before giving up.
pub fn solve_fundamental_mode(geometry: &WireGeometry, wavelength: f64) -> Result<PlasmonMode> {
    if !(wavelength > 0.0) || !wavelength.is_finite() {
        return Err(Error::InvalidInput(format!("wavelength must be positive, got {wavelength} m")));
    }
    if !(geometry.eps_metal.re < -geometry.eps_dielectric) {
        return Err(Error::NoMode(format!(
            "Re eps_metal = {} is not below -eps_dielectric = {}",
            geometry.eps_metal.re, -geometry.eps_dielectric
        )));
    }
    let low = 1.001 * geometry.eps_dielectric.sqrt();
    let mut f = |n: Complex64| dispersion_residual(n, geometry, wavelength);
    let mut last_err = None;
    for upper in [6.0, 12.0, 24.0] {
        let region = RootRegion::from_bounds((low, upper), (-0.05, 1.0))?;
        match find_complex_root_report(&mut f, &region, 1e-13) {
            Ok(report) => {
                return finish_mode(geometry, wavelength, report.root);
            }
            Err(Error::NoRootInRegion { .. }) => {
                last_err = Some(Error::NoMode(format!(
                    "winding number 0 in Re n [{low:.4}, {upper}], Im n [-0.05, 1]"
                )));
            }
            Err(Error::MultipleRootsInRegion { winding }) => {
                return Err(Error::NoMode(format!(
                    "{winding} zeros of the dispersion residual in the search region"
                )))
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran"))
}

fn finish_mode(geometry: &WireGeometry, wavelength: f64, mut n: Complex64) -> Result<PlasmonMode> {
    let lossless = geometry.eps_metal.im == 0.0;
    if lossless {
        // the zero is real; drop the rounding-level imaginary part
        n.im = 0.0;
    }
    let rel = relative_residual(n, geometry, wavelength)?;
    if rel >= RESIDUAL_TARGET {
        return Err(Error::RootNotConverged { best: n, residual: rel });
    }
    let half = 1e-3 * n.norm();
    let mut f = |z: Complex64| dispersion_residual(z, geometry, wavelength);
    let winding = winding_number(&mut f, &RootRegion::new(n, half, half)?)?.count;
    if winding != 1 {
        return Err(Error::NoMode(format!("winding number {winding} around the solved index {n}")));
    }
    let mut mode = PlasmonMode::from_index(*geometry, wavelength, n);
    mode.relative_residual = rel;
    mode.certified_winding = winding;
    Ok(mode)
}

/// `λ / (4π Im n_eff)` in m; `f64::INFINITY` when `Im n_eff <= 0`.
pub fn propagation_length(mode: &PlasmonMode) -> f64 {
    if mode.n_eff.im > 0.0 {
        mode.vacuum_wavelength / (4.0 * PI * mode.n_eff.im)
    } else {
        f64::INFINITY
    }
}

/// Field sample at radius `r` (m) with `E_z(R⁺) = 1`.
pub fn mode_fields(mode: &PlasmonMode, r: f64) -> Result<ModeFieldSample> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("radius must be non-negative, got {r} m")));
    }
    let g = &mode.geometry;
    let k0 = mode.k0();
    let kz = mode.n_eff * k0;
    let radius = g.radius;
    let zero = Complex64::new(0.0, 0.0);
    if r < radius {
        let km = transverse_wavenumber(k0, mode.n_eff, g.eps_metal);
        let at_surface = i_scaled_seq(km * radius, 1);
        let here = i_scaled_seq(km * r, 1);
        // I(κr)/I(κR) with the exp(|Re x|) scalings restored
        let growth = Complex64::new((km.re * r).abs() - (km.re * radius).abs(), 0.0).exp();
        let ez = here[0] / at_surface[0] * growth;
        let i1 = here[1] / at_surface[0] * growth;
        Ok(ModeFieldSample {
            r,
            e_r: -Complex64::i() * kz * i1 / km,
            e_phi: zero,
            e_z: ez,
            h_phi: -Complex64::i() * k0 * g.eps_metal * i1 / km,
        })
    } else {
        let k1 = transverse_wavenumber(k0, mode.n_eff, Complex64::new(g.eps_dielectric, 0.0));
        let at_surface = k_scaled_seq(k1 * radius, 1);
        let here = k_scaled_seq(k1 * r, 1);
        let decay = (-k1 * (r - radius)).exp();
        let ez = here[0] / at_surface[0] * decay;
        let k1v = here[1] / at_surface[0] * decay;
        Ok(ModeFieldSample {
            r,
            e_r: Complex64::i() * kz * k1v / k1,
            e_phi: zero,
            e_z: ez,
            h_phi: Complex64::i() * k0 * g.eps_dielectric * k1v / k1,
        })
    }
}

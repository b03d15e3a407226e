//! Scattered Green's function of a dielectric–metal cylinder at the dipole
//! position, as an integrand over the axial wavenumber `k_z`.
//!
//! Lengths are in nm and frequencies in the normalized units
//! `ε₀ = μ₀ = c = 1`, so `ω = k₀`. For each angular order `m` the incident
//! dipole field is expanded in regular waves `J_m(k_ρ ρ)`; continuity of
//! `E_z, H_z, E_φ, H_φ` at `ρ = R` gives a 2×2 system for the outgoing
//! amplitudes (the interior amplitudes are eliminated). Amplitudes are
//! normalized by their surface values, so only logarithmic derivatives and
//! ratio products of Bessel functions appear and nothing overflows.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::bessel::{h1_ratios, h1_scaled_seq, j_ratios, j_scaled_seq, log_derivative};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dipole orientation relative to the wire axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Radial,
    Axial,
    Azimuthal,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::Radial => "radial",
            Orientation::Axial => "axial",
            Orientation::Azimuthal => "azimuthal",
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "radial" | "r" => Ok(Orientation::Radial),
            "axial" | "z" => Ok(Orientation::Axial),
            "azimuthal" | "phi" => Ok(Orientation::Azimuthal),
            other => Err(Error::InvalidInput(format!("unknown orientation {other:?}"))),
        }
    }
}

/// Truncation rule for the angular-order sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderPolicy {
    /// orders `0..=start` are always summed
    pub start: usize,
    /// stop once an order contributes less than this fraction
    pub tol: f64,
    pub max: usize,
}

impl Default for OrderPolicy {
    fn default() -> Self {
        Self {
            start: 10,
            tol: 1e-4,
            max: 200,
        }
    }
}

/// Fixed physical inputs of one emitter placement.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Setup {
    pub k0: f64,
    pub eps1: f64,
    pub eps2: Complex64,
    /// wire radius, nm
    pub radius: f64,
    /// dipole radial position, nm
    pub rho0: f64,
    pub orientation: Orientation,
}

impl Setup {
    pub fn k1(&self) -> f64 {
        self.eps1.sqrt() * self.k0
    }

    /// Integrand magnitude below which an order is negligible regardless of
    /// the running sum; a change of this size over a `k₁`-wide interval moves
    /// the enhancement by about 1e-3.
    fn absolute_floor(&self) -> f64 {
        let k1 = self.k1();
        1e-3 * k1 * k1 / (12.0 * PI * self.eps1)
    }
}

/// Exterior radial wavenumber `sqrt(k₁² − k_z²)` with `Im ≥ 0` (and `Re ≥ 0`
/// when real): outgoing or decaying away from the wire.
pub(crate) fn radial_wavenumber_outside(k1: f64, kz: Complex64) -> Complex64 {
    let mut s = (k1 * k1 - kz * kz).sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        s = -s;
    }
    s
}

/// Value of the `k_z` integrand and the highest order summed.
pub(crate) struct Sample {
    pub value: Complex64,
    pub max_order: usize,
}

struct Surface {
    kr1: Complex64,
    kr2: Complex64,
    u: Complex64,
    v: Complex64,
    x0: Complex64,
    ju: Vec<Complex64>,
    jv: Vec<Complex64>,
    hu: Vec<Complex64>,
    hx: Vec<Complex64>,
}

fn surface(setup: &Setup, kz: Complex64, orders: usize) -> Surface {
    let kr1 = radial_wavenumber_outside(setup.k1(), kz);
    // interior functions only enter through J'/J(v)/k_ρ2, which is even in k_ρ2
    let kr2 = (setup.eps2 * setup.k0 * setup.k0 - kz * kz).sqrt();
    let u = kr1 * setup.radius;
    let v = kr2 * setup.radius;
    let x0 = kr1 * setup.rho0;
    Surface {
        kr1,
        kr2,
        u,
        v,
        x0,
        ju: j_ratios(u, orders + 1),
        jv: j_ratios(v, orders + 1),
        hu: h1_ratios(u, orders + 1),
        hx: h1_ratios(x0, orders + 1),
    }
}

/// `∂_ρ`-log-derivatives and denominators of order `m` at the surface.
struct OrderTerms {
    h0: Complex64,
    a_h: Complex64,
    b_h: Complex64,
    a_p: Complex64,
    b_p: Complex64,
}

fn order_terms(s: &Surface, setup: &Setup, m: usize) -> OrderTerms {
    let p1 = log_derivative(&s.ju, m, s.u);
    let h1 = log_derivative(&s.hu, m, s.u);
    let q2 = log_derivative(&s.jv, m, s.v);
    let h0 = log_derivative(&s.hx, m, s.x0);
    let e1 = setup.eps1;
    let e2 = setup.eps2;
    OrderTerms {
        h0,
        b_h: h1 / s.kr1 - q2 / s.kr2,
        a_h: e1 * h1 / s.kr1 - e2 * q2 / s.kr2,
        b_p: p1 / s.kr1 - q2 / s.kr2,
        a_p: e1 * p1 / s.kr1 - e2 * q2 / s.kr2,
    }
}

/// Scattered field component along the dipole for signed order `sm`, in
/// units of the common factor `i/(8π) · J_m(u) H_m(u) · g₀²`.
fn order_field(setup: &Setup, s: &Surface, t: &OrderTerms, kz: Complex64, sm: f64) -> Complex64 {
    let w = setup.k0;
    let e1 = setup.eps1;
    let rho0 = setup.rho0;
    let kr1 = s.kr1;
    let alpha = kz * sm / setup.radius * (1.0 / (kr1 * kr1) - 1.0 / (s.kr2 * s.kr2));
    let (a_e, b) = match setup.orientation {
        Orientation::Radial => (-(I * kz * kr1 / e1) * t.h0, Complex64::new(-(w * sm / rho0), 0.0)),
        Orientation::Axial => (kr1 * kr1 / e1, Complex64::new(0.0, 0.0)),
        Orientation::Azimuthal => (-(kz * sm / (e1 * rho0)), I * w * kr1 * t.h0),
    };
    // [[iα, −ω B_h], [ω A_h, iα]] (c_E, c_H) = rhs
    let m00 = I * alpha;
    let m01 = -w * t.b_h;
    let m10 = w * t.a_h;
    let m11 = I * alpha;
    let r0 = -I * alpha * a_e + w * t.b_p * b;
    let r1 = -I * alpha * b - w * t.a_p * a_e;
    let det = m00 * m11 - m01 * m10;
    let c_e = (m11 * r0 - m01 * r1) / det;
    let c_h = (m00 * r1 - m10 * r0) / det;
    match setup.orientation {
        Orientation::Radial => (I / (kr1 * kr1)) * (kz * c_e * kr1 * t.h0 + w * (I * sm / rho0) * c_h),
        Orientation::Axial => c_e,
        Orientation::Azimuthal => (I / (kr1 * kr1)) * (kz * (I * sm / rho0) * c_e - w * c_h * kr1 * t.h0),
    }
}

/// `p̂·G_sc(r₀, r₀, k_z)·p̂`, summed over orders under `policy`; only
/// `m = 0` when `policy.max == 0`.
pub(crate) fn integrand(setup: &Setup, kz: Complex64, policy: &OrderPolicy) -> Result<Sample> {
    // most points converge well below the cap; only near-field points at
    // large k_z need the long recurrences
    let first = policy.max.min(FIRST_PASS_ORDERS);
    match order_sum(setup, kz, policy, first)? {
        Ok(sample) => return Ok(sample),
        Err(sum) if first == policy.max => return unconverged(kz, first, sum),
        Err(_) => {}
    }
    match order_sum(setup, kz, policy, policy.max)? {
        Ok(sample) => Ok(sample),
        Err(sum) => unconverged(kz, policy.max, sum),
    }
}

const FIRST_PASS_ORDERS: usize = 64;

fn unconverged(kz: Complex64, last: usize, sum: Complex64) -> Result<Sample> {
    log::warn!("order sum unconverged at k_z = {kz} after m = {last}");
    Err(Error::Accuracy {
        estimate: sum,
        error_bound: f64::NAN,
    })
}

/// Sums orders `0..=cap`; the inner error carries the partial sum when the
/// stopping rule was not met.
fn order_sum(setup: &Setup, kz: Complex64, policy: &OrderPolicy, cap: usize) -> Result<std::result::Result<Sample, Complex64>> {
    let s = surface(setup, kz, cap);
    // J_0(u) H_0(u) and H_0(x0)/H_0(u), from scaled values
    let j0 = j_scaled_seq(s.u, 0)[0];
    let hu0 = h1_scaled_seq(s.u, 0)[0];
    let hx0 = h1_scaled_seq(s.x0, 0)[0];
    let mut jh = j0 * hu0 * (Complex64::new(s.u.im.abs(), 0.0) + I * s.u).exp();
    let mut g0 = hx0 / hu0 * (I * (s.x0 - s.u)).exp();
    let floor = setup.absolute_floor();
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..=cap {
        if m > 0 {
            jh *= s.ju[m] * s.hu[m];
            g0 *= s.hx[m] / s.hu[m];
        }
        let t = order_terms(&s, setup, m);
        let weight = jh * g0 * g0;
        let mut contribution = order_field(setup, &s, &t, kz, m as f64) * weight;
        if m > 0 {
            contribution += order_field(setup, &s, &t, kz, -(m as f64)) * weight;
        }
        let contribution = contribution * (I / (8.0 * PI));
        if !contribution.re.is_finite() || !contribution.im.is_finite() {
            return Err(Error::Range(format!("non-finite Green's-function term at k_z = {kz}, m = {m}")));
        }
        sum += contribution;
        if m >= policy.start && contribution.norm() < policy.tol * sum.norm().max(floor) {
            return Ok(Ok(Sample {
                value: sum,
                max_order: m,
            }));
        }
    }
    if policy.max == 0 {
        return Ok(Ok(Sample {
            value: sum,
            max_order: 0,
        }));
    }
    Ok(Err(sum))
}

/// TM denominator `A_h` of order 0 at `k_z`: its zero is the guided plasmon.
///
/// Equal to the mode-solver residual `D` written with Hankel and Bessel
/// functions of the radial wavenumbers instead of `K` and `I`.
pub fn tm_denominator(kz: Complex64, radius_nm: f64, k0: f64, eps1: f64, eps2: Complex64) -> Complex64 {
    let setup = Setup {
        k0,
        eps1,
        eps2,
        radius: radius_nm,
        rho0: 2.0 * radius_nm,
        orientation: Orientation::Radial,
    };
    let s = surface(&setup, kz, 0);
    order_terms(&s, &setup, 0).a_h
}

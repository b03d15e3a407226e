//! Drude permittivity of silver and its least-squares fit to tabulated
//! optical constants.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::csvio;
use crate::error::{Error, Result};
use crate::numerics::lm::{levenberg_marquardt, LmOptions};

/// Reduced Planck constant in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Header of the optical-constant CSV format.
pub const TABLE_HEADER: [&str; 3] = ["wavelength_nm", "eps_re", "eps_im"];

const BUNDLED_SILVER: &str = include_str!("../data/silver_optical_constants.csv");

/// Angular frequency (rad/s) of light with vacuum wavelength `nm`.
pub fn angular_frequency(wavelength_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

/// `ε(ω) = ε∞ − ωp² / (ω² + iγω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParameters {
    pub eps_inf: f64,
    /// plasma frequency, rad/s
    pub omega_p: f64,
    /// collision rate, rad/s
    pub gamma: f64,
}

impl DrudeParameters {
    pub fn new(eps_inf: f64, omega_p: f64, gamma: f64) -> Result<Self> {
        if !(omega_p > 0.0) || !omega_p.is_finite() {
            return Err(Error::InvalidInput(format!("omega_p must be positive, got {omega_p}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!("gamma must be non-negative, got {gamma}")));
        }
        if !(eps_inf >= 1.0) || !eps_inf.is_finite() {
            return Err(Error::InvalidInput(format!("eps_inf must be >= 1, got {eps_inf}")));
        }
        Ok(Self {
            eps_inf,
            omega_p,
            gamma,
        })
    }

    /// Parameters with the plasma and collision energies given in eV.
    pub fn from_ev(eps_inf: f64, hbar_omega_p_ev: f64, hbar_gamma_ev: f64) -> Result<Self> {
        Self::new(eps_inf, hbar_omega_p_ev / HBAR_EV_S, hbar_gamma_ev / HBAR_EV_S)
    }

    pub fn hbar_omega_p_ev(&self) -> f64 {
        self.omega_p * HBAR_EV_S
    }

    pub fn hbar_gamma_ev(&self) -> f64 {
        self.gamma * HBAR_EV_S
    }

    /// Silver defaults: the fit of the bundled table over 600–800 nm
    /// (see `fit_drude`; the unit tests re-run the fit and compare).
    pub fn silver_default() -> Self {
        Self {
            eps_inf: SILVER_EPS_INF,
            omega_p: SILVER_HBAR_OMEGA_P_EV / HBAR_EV_S,
            gamma: SILVER_HBAR_GAMMA_EV / HBAR_EV_S,
        }
    }

    /// The same metal without damping.
    pub fn lossless(&self) -> Self {
        Self { gamma: 0.0, ..*self }
    }

    /// Permittivity at vacuum wavelength `wavelength_nm`.
    pub fn epsilon(&self, wavelength_nm: f64) -> Complex64 {
        let w = angular_frequency(wavelength_nm);
        self.eps_inf - self.omega_p * self.omega_p / Complex64::new(w * w, self.gamma * w)
    }

    /// `d(ω Re ε)/dω` at `wavelength_nm` for the undamped model,
    /// `ε∞ + ωp²/ω²`; used by the energy-density of a lossless mode.
    pub fn energy_dispersion_factor(&self, wavelength_nm: f64) -> f64 {
        let w = angular_frequency(wavelength_nm);
        self.eps_inf + (self.omega_p / w).powi(2)
    }
}

const SILVER_EPS_INF: f64 = 3.161_010_356_775_759;
const SILVER_HBAR_OMEGA_P_EV: f64 = 9.073_907_329_809_936;
const SILVER_HBAR_GAMMA_EV: f64 = 0.023_522_696_814_489_2;

/// Drude permittivity at `wavelength_nm`; errors for a non-positive wavelength.
pub fn drude_epsilon(wavelength_nm: f64, params: &DrudeParameters) -> Result<Complex64> {
    if !(wavelength_nm > 0.0) || !wavelength_nm.is_finite() {
        return Err(Error::InvalidInput(format!("wavelength must be positive, got {wavelength_nm} nm")));
    }
    Ok(params.epsilon(wavelength_nm))
}

/// Tabulated complex permittivity against vacuum wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalConstantTable {
    rows: Vec<(f64, Complex64)>,
}

impl OpticalConstantTable {
    /// Rows of `(wavelength nm, ε)`; wavelengths strictly increasing, `Im ε ≥ 0`.
    pub fn new(rows: Vec<(f64, Complex64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InsufficientData(format!("table needs at least 2 rows, got {}", rows.len())));
        }
        for (i, &(wl, eps)) in rows.iter().enumerate() {
            if !(wl > 0.0) || !wl.is_finite() || !eps.re.is_finite() || !eps.im.is_finite() {
                return Err(Error::InvalidInput(format!("row {}: invalid entry ({wl}, {eps})", i + 1)));
            }
            if eps.im < 0.0 {
                return Err(Error::InvalidInput(format!("row {}: Im eps = {} < 0 (active medium)", i + 1, eps.im)));
            }
            if i > 0 && wl <= rows[i - 1].0 {
                return Err(Error::InvalidInput(format!("row {}: wavelengths must increase strictly", i + 1)));
            }
        }
        Ok(Self { rows })
    }

    /// Parses the `wavelength_nm,eps_re,eps_im` CSV format.
    pub fn from_csv_str(text: &str, source: &str) -> Result<Self> {
        let rows = csvio::read_rows(text, source, &TABLE_HEADER)?;
        let mut out = Vec::with_capacity(rows.len());
        for row in &rows {
            let wl: f64 = row.parse(0, source)?;
            let re: f64 = row.parse(1, source)?;
            let im: f64 = row.parse(2, source)?;
            if let Some(&(prev, _)) = out.last() {
                if wl <= prev {
                    return Err(Error::parse(source, row.line, "wavelengths must increase strictly"));
                }
            }
            if im < 0.0 {
                return Err(Error::parse(source, row.line, "negative Im eps"));
            }
            out.push((wl, Complex64::new(re, im)));
        }
        Self::new(out)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = csvio::read_file(path)?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    /// The bundled silver table (Johnson & Christy, 496–892 nm).
    pub fn bundled_silver() -> Self {
        Self::from_csv_str(BUNDLED_SILVER, "silver_optical_constants.csv").expect("bundled table is valid")
    }

    pub fn rows(&self) -> &[(f64, Complex64)] {
        &self.rows
    }

    /// Linear interpolation in wavelength; `None` outside the tabulated span.
    pub fn interpolate(&self, wavelength_nm: f64) -> Option<Complex64> {
        let rows = &self.rows;
        if wavelength_nm < rows[0].0 || wavelength_nm > rows[rows.len() - 1].0 {
            return None;
        }
        let i = rows.partition_point(|r| r.0 <= wavelength_nm).clamp(1, rows.len() - 1);
        let (x0, y0) = rows[i - 1];
        let (x1, y1) = rows[i];
        let t = (wavelength_nm - x0) / (x1 - x0);
        Some(y0 + (y1 - y0) * t)
    }

    pub fn to_csv(&self) -> String {
        let mut s = TABLE_HEADER.join(",");
        s.push('\n');
        for (wl, eps) in &self.rows {
            s.push_str(&format!("{wl:?},{:?},{:?}\n", eps.re, eps.im));
        }
        s
    }
}

/// Fitted parameters and the per-row relative deviation `|ε_fit − ε| / |ε|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrudeFit {
    pub params: DrudeParameters,
    /// `(wavelength nm, relative residual)` for each row inside the range
    pub residuals: Vec<(f64, f64)>,
    pub iterations: usize,
}

impl DrudeFit {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Least-squares Drude fit to the table rows with wavelength in `range`.
///
/// The residual vector holds `ΔRe ε / |Re ε|` and `ΔIm ε / Im ε` for every
/// row, so the small loss part carries the same weight as the large real
/// part. Start point: ε∞ = 4, ħωp = 9 eV, ħγ = 0.02 eV.
pub fn fit_drude(table: &OpticalConstantTable, range: (f64, f64)) -> Result<DrudeFit> {
    let rows: Vec<(f64, Complex64)> = table
        .rows()
        .iter()
        .copied()
        .filter(|r| r.0 >= range.0 && r.0 <= range.1)
        .collect();
    if rows.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} table rows in {}–{} nm; the fit needs at least 3",
            rows.len(),
            range.0,
            range.1
        )));
    }
    let weight = |v: f64| if v.abs() > 0.0 { 1.0 / v.abs() } else { 1.0 };
    let residual = |p: &[f64]| -> Result<Vec<f64>> {
        let params = DrudeParameters {
            eps_inf: p[0],
            omega_p: p[1] / HBAR_EV_S,
            gamma: p[2] / HBAR_EV_S,
        };
        let mut r = Vec::with_capacity(2 * rows.len());
        for &(wl, eps) in &rows {
            let model = params.epsilon(wl);
            r.push((model.re - eps.re) * weight(eps.re));
            r.push((model.im - eps.im) * weight(eps.im));
        }
        Ok(r)
    };
    let options = LmOptions {
        max_iterations: 1000,
        ..LmOptions::default()
    };
    let fit = levenberg_marquardt(residual, &[4.0, 9.0, 0.02], &options)?;
    let params = DrudeParameters::from_ev(fit.params[0], fit.params[1], fit.params[2]).map_err(|e| {
        Error::FitNotConverged(format!(
            "fit left the physical domain: eps_inf={}, hbar_wp={} eV, hbar_gamma={} eV ({e})",
            fit.params[0], fit.params[1], fit.params[2]
        ))
    })?;
    let residuals = rows
        .iter()
        .map(|&(wl, eps)| (wl, (params.epsilon(wl) - eps).norm() / eps.norm()))
        .collect();
    Ok(DrudeFit {
        params,
        residuals,
        iterations: fit.iterations,
    })
}

//! Total enhancement over a grid of wire diameters and emitter distances.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::green::Orientation;
use super::rates::{total_enhancement_with, CouplingConfig, EmitterConfig};
use crate::csvio;
use crate::error::{Error, Result};
use crate::materials::DrudeParameters;
use crate::mode::WireGeometry;

/// Diameter range accepted by [`enhancement_map`], nm.
pub const DIAMETER_RANGE_NM: (f64, f64) = (30.0, 80.0);
/// Distance range accepted by [`enhancement_map`], nm.
pub const DISTANCE_RANGE_NM: (f64, f64) = (5.0, 60.0);

/// Physical inputs shared by every cell of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapMetadata {
    pub wavelength_nm: f64,
    pub eps1: f64,
    pub orientation: Orientation,
    pub drude: DrudeParameters,
}

/// A cell whose computation failed; its value in the grid is NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct CellError {
    pub row: usize,
    pub col: usize,
    pub message: String,
}

/// `total[i][j]` is the enhancement at `diameter_axis[i]`, `distance_axis[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhancementMap {
    pub diameter_axis: Vec<f64>,
    pub distance_axis: Vec<f64>,
    pub total: Vec<Vec<f64>>,
    pub metadata: MapMetadata,
    pub cell_errors: Vec<CellError>,
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn check_axis(name: &str, axis: &[f64], range: (f64, f64)) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidInput(format!("{name} axis is empty")));
    }
    for &v in axis {
        if !(v >= range.0 - 1e-9 && v <= range.1 + 1e-9) {
            return Err(Error::InvalidInput(format!(
                "{name} {v} nm outside the validated range [{}, {}] nm",
                range.0, range.1
            )));
        }
    }
    Ok(())
}

/// Evaluates the total enhancement on every grid cell, in parallel.
///
/// Only the total is computed; the channel split is left to
/// [`total_rate_enhancement`](super::rates::total_rate_enhancement).
///
/// Cells are computed independently and gathered in index order, so the
/// result does not depend on the thread count.
pub fn enhancement_map(
    diameters_nm: &[f64],
    distances_nm: &[f64],
    metadata: MapMetadata,
) -> Result<EnhancementMap> {
    enhancement_map_with(diameters_nm, distances_nm, metadata, &CouplingConfig::default())
}

pub fn enhancement_map_with(
    diameters_nm: &[f64],
    distances_nm: &[f64],
    metadata: MapMetadata,
    config: &CouplingConfig,
) -> Result<EnhancementMap> {
    check_axis("diameter", diameters_nm, DIAMETER_RANGE_NM)?;
    check_axis("distance", distances_nm, DISTANCE_RANGE_NM)?;
    let wavelength = metadata.wavelength_nm / 1e9;
    let cells: Vec<(usize, usize)> = (0..diameters_nm.len())
        .flat_map(|i| (0..distances_nm.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<std::result::Result<f64, String>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let geometry = WireGeometry::with_drude(0.5 * diameters_nm[i] / 1e9, &metadata.drude, wavelength, metadata.eps1)
                .map_err(|e| e.to_string())?;
            let emitter = EmitterConfig::new(distances_nm[j] / 1e9, metadata.orientation, wavelength, metadata.eps1)
                .map_err(|e| e.to_string())?;
            total_enhancement_with(&geometry, &emitter, config).map_err(|e| e.to_string())
        })
        .collect();
    let cols = distances_nm.len();
    let mut total = vec![vec![f64::NAN; cols]; diameters_nm.len()];
    let mut cell_errors = Vec::new();
    for (&(i, j), v) in cells.iter().zip(values) {
        match v {
            Ok(x) => total[i][j] = x,
            Err(message) => cell_errors.push(CellError { row: i, col: j, message }),
        }
    }
    Ok(EnhancementMap {
        diameter_axis: diameters_nm.to_vec(),
        distance_axis: distances_nm.to_vec(),
        total,
        metadata,
        cell_errors,
    })
}

impl EnhancementMap {
    /// Grid CSV: a header of distances, then one row per diameter.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("diameter_nm");
        for d in &self.distance_axis {
            write!(s, ",{d:?}").expect("string write");
        }
        s.push('\n');
        for (d, row) in self.diameter_axis.iter().zip(&self.total) {
            write!(s, "{d:?}").expect("string write");
            for v in row {
                write!(s, ",{v:?}").expect("string write");
            }
            s.push('\n');
        }
        s
    }

    /// Key-value sidecar with the physical inputs.
    pub fn metadata_text(&self) -> String {
        let m = &self.metadata;
        let mut s = String::new();
        writeln!(s, "wavelength_nm = {:?}", m.wavelength_nm).expect("string write");
        writeln!(s, "eps1 = {:?}", m.eps1).expect("string write");
        writeln!(s, "orientation = {}", m.orientation.name()).expect("string write");
        writeln!(s, "eps_inf = {:?}", m.drude.eps_inf).expect("string write");
        writeln!(s, "hbar_omega_p_ev = {:?}", m.drude.hbar_omega_p_ev()).expect("string write");
        writeln!(s, "hbar_gamma_ev = {:?}", m.drude.hbar_gamma_ev()).expect("string write");
        writeln!(s, "rows = {}", self.diameter_axis.len()).expect("string write");
        writeln!(s, "cols = {}", self.distance_axis.len()).expect("string write");
        writeln!(s, "failed_cells = {}", self.cell_errors.len()).expect("string write");
        for e in &self.cell_errors {
            writeln!(s, "# cell {} {}: {}", e.row, e.col, e.message.replace('\n', " ")).expect("string write");
        }
        s
    }

    /// Sidecar path next to a map CSV: `<file>.meta`.
    pub fn sidecar_path(csv_path: &Path) -> PathBuf {
        let mut p = csv_path.as_os_str().to_owned();
        p.push(".meta");
        PathBuf::from(p)
    }

    /// Writes the grid CSV and its sidecar.
    pub fn write(&self, csv_path: &Path) -> Result<()> {
        csvio::write_file(csv_path, &self.to_csv())?;
        csvio::write_file(&Self::sidecar_path(csv_path), &self.metadata_text())
    }

    /// Parses a grid CSV and its sidecar text.
    pub fn parse(csv_text: &str, meta_text: &str, source: &str) -> Result<Self> {
        let mut lines = csv_text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(source, 1, "empty map file"))?;
        let mut head = header.split(',');
        if head.next().map(str::trim) != Some("diameter_nm") {
            return Err(Error::parse(source, 1, "first header cell must be diameter_nm"));
        }
        let distance_axis = head
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::parse(source, 1, format!("bad distance {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut diameter_axis = Vec::new();
        let mut total = Vec::new();
        for (idx, line) in lines {
            let values = line
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(source, idx + 1, format!("bad number {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != distance_axis.len() + 1 {
                return Err(Error::parse(source, idx + 1, "row length does not match the header"));
            }
            diameter_axis.push(values[0]);
            total.push(values[1..].to_vec());
        }
        let kv = crate::config::parse_key_values(meta_text, &format!("{source}.meta"))?;
        let get = |k: &str| -> Result<String> {
            kv.get(k)
                .cloned()
                .ok_or_else(|| Error::parse(format!("{source}.meta"), 0, format!("missing key {k}")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse::<f64>()
                .map_err(|_| Error::parse(format!("{source}.meta"), 0, format!("bad value for {k}")))
        };
        let drude = DrudeParameters::from_ev(num("eps_inf")?, num("hbar_omega_p_ev")?, num("hbar_gamma_ev")?)?;
        let metadata = MapMetadata {
            wavelength_nm: num("wavelength_nm")?,
            eps1: num("eps1")?,
            orientation: get("orientation")?.parse()?,
            drude,
        };
        Ok(Self {
            diameter_axis,
            distance_axis,
            total,
            metadata,
            cell_errors: Vec::new(),
        })
    }
}

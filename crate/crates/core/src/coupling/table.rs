//! Measured systems and their predicted minimum enhancement.

use std::fmt::Write as _;
use std::path::Path;

use super::green::Orientation;
use super::rates::{total_rate_enhancement, EmitterConfig};
use crate::csvio::{self, read_rows};
use crate::error::{Error, Result};
use crate::materials::DrudeParameters;
use crate::mode::WireGeometry;

pub const RECORDS_HEADER: [&str; 5] = [
    "wire_diameter_nm",
    "diamond_height_nm",
    "measured_enhancement",
    "measured_error",
    "reported_min_enhancement",
];

const BUNDLED_RECORDS: &str = include_str!("../../data/measured_systems.csv");

/// Working point of the predictions.
pub const TABLE_WAVELENGTH_NM: f64 = 700.0;
pub const TABLE_EPS1: f64 = 3.0;

/// One measured wire–crystal system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemRecord {
    pub wire_diameter_nm: f64,
    pub diamond_height_nm: f64,
    pub measured_enhancement: f64,
    pub measured_error: f64,
    /// published minimum expected enhancement, if known
    pub reported_min_enhancement: Option<f64>,
    pub predicted_min_enhancement: Option<f64>,
}

impl SystemRecord {
    pub fn new(wire_diameter_nm: f64, diamond_height_nm: f64, measured_enhancement: f64, measured_error: f64) -> Result<Self> {
        if !(wire_diameter_nm > 0.0 && diamond_height_nm > 0.0) {
            return Err(Error::InvalidInput(format!(
                "diameter and height must be positive, got {wire_diameter_nm} nm and {diamond_height_nm} nm"
            )));
        }
        Ok(Self {
            wire_diameter_nm,
            diamond_height_nm,
            measured_enhancement,
            measured_error,
            reported_min_enhancement: None,
            predicted_min_enhancement: None,
        })
    }
}

pub fn parse_records(text: &str, source: &str) -> Result<Vec<SystemRecord>> {
    let rows = read_rows(text, source, &RECORDS_HEADER)?;
    rows.iter()
        .map(|row| {
            let mut r = SystemRecord::new(
                row.parse(0, source)?,
                row.parse(1, source)?,
                row.parse(2, source)?,
                row.parse(3, source)?,
            )
            .map_err(|e| Error::parse(source, row.line, e.to_string()))?;
            let reported = row.fields.get(4).unwrap_or("");
            if !reported.is_empty() {
                r.reported_min_enhancement = Some(row.parse(4, source)?);
            }
            Ok(r)
        })
        .collect()
}

pub fn read_records(path: &Path) -> Result<Vec<SystemRecord>> {
    parse_records(&csvio::read_file(path)?, &path.display().to_string())
}

pub fn bundled_records() -> Vec<SystemRecord> {
    parse_records(BUNDLED_RECORDS, "measured_systems.csv").expect("bundled records parse")
}

/// Fills `predicted_min_enhancement`: radial dipole at `d′ = diamond height`.
pub fn predict_table(records: &[SystemRecord], drude: &DrudeParameters) -> Result<Vec<SystemRecord>> {
    let wavelength = TABLE_WAVELENGTH_NM / 1e9;
    records
        .iter()
        .map(|r| {
            let geometry = WireGeometry::with_drude(0.5 * r.wire_diameter_nm / 1e9, drude, wavelength, TABLE_EPS1)?;
            let emitter = EmitterConfig::new(r.diamond_height_nm / 1e9, Orientation::Radial, wavelength, TABLE_EPS1)?;
            let rates = total_rate_enhancement(&geometry, &emitter)?;
            Ok(SystemRecord {
                predicted_min_enhancement: Some(rates.total),
                ..*r
            })
        })
        .collect()
}

pub const TABLE_OUTPUT_HEADER: [&str; 6] = [
    "wire_diameter_nm",
    "diamond_height_nm",
    "measured_enhancement",
    "measured_error",
    "reported_min_enhancement",
    "predicted_min_enhancement",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn records_to_csv(records: &[SystemRecord]) -> String {
    let mut s = TABLE_OUTPUT_HEADER.join(",");
    s.push('\n');
    for r in records {
        writeln!(
            s,
            "{:?},{:?},{:?},{:?},{},{}",
            r.wire_diameter_nm,
            r.diamond_height_nm,
            r.measured_enhancement,
            r.measured_error,
            opt(r.reported_min_enhancement),
            opt(r.predicted_min_enhancement)
        )
        .expect("string write");
    }
    s
}

pub fn parse_table_output(text: &str, source: &str) -> Result<Vec<SystemRecord>> {
    let rows = read_rows(text, source, &TABLE_OUTPUT_HEADER)?;
    rows.iter()
        .map(|row| {
            let mut r = SystemRecord::new(
                row.parse(0, source)?,
                row.parse(1, source)?,
                row.parse(2, source)?,
                row.parse(3, source)?,
            )
            .map_err(|e| Error::parse(source, row.line, e.to_string()))?;
            for (idx, slot) in [(4, &mut r.reported_min_enhancement), (5, &mut r.predicted_min_enhancement)] {
                if !row.fields.get(idx).unwrap_or("").is_empty() {
                    *slot = Some(row.parse(idx, source)?);
                }
            }
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_records_load() {
        let r = bundled_records();
        assert_eq!(r.len(), 5);
        assert_eq!(r[3].wire_diameter_nm, 63.0);
        assert_eq!(r[3].diamond_height_nm, 17.0);
        assert_eq!(r[3].reported_min_enhancement, Some(5.7));
    }

    #[test]
    fn invalid_geometry_names_line() {
        let text = format!("{}\n65,45,4.6,0.1,2.2\n-1,40,2.9,0.1,2.4\n", RECORDS_HEADER.join(","));
        let e = parse_records(&text, "t.csv").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn output_round_trip() {
        let mut r = bundled_records();
        r[0].predicted_min_enhancement = Some(2.571234567891234);
        let text = records_to_csv(&r);
        assert_eq!(parse_table_output(&text, "o.csv").unwrap(), r);
    }
}

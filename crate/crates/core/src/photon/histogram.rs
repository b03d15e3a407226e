//! Start–stop delay histograms of time-tag streams.

use std::fmt::Write as _;
use std::path::Path;

use super::stream::{pulse_time_ps, TimeTagStream};
use crate::csvio::{self, read_rows};
use crate::error::{Error, Result};

/// Default bin widths, ps.
pub const LIFETIME_BIN_PS: u64 = 200;
pub const G2_BIN_PS: u64 = 1000;

/// Histogram with uniform bins `[start, start + bin_width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width_ps: u64,
    pub bin_starts_ps: Vec<i64>,
    pub counts: Vec<f64>,
}

/// What starts a delay measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sync {
    /// excitation pulses of the given period; stops are detections on either
    /// detector
    PulseTrain { period_ps: f64 },
    /// detector 1 starts and detector 2 stops (positive delays); detector 2
    /// starts and detector 1 stops (negative delays)
    Channel,
}

pub const HISTOGRAM_HEADER: [&str; 2] = ["bin_start_ps", "count"];

const BUNDLED_G2: &str = include_str!("../../data/g2_single_emitter.csv");

/// Bundled correlation histogram of a simulated single emitter under CW
/// pumping (1 ns bins, ±600 ns).
pub fn bundled_g2_histogram() -> Histogram {
    Histogram::parse(BUNDLED_G2, "g2_single_emitter.csv").expect("bundled histogram parses")
}

impl Histogram {
    /// Zeroed bins starting at `first_start_ps`.
    pub fn zeros(first_start_ps: i64, bin_width_ps: u64, bins: usize) -> Self {
        Self {
            bin_width_ps,
            bin_starts_ps: (0..bins).map(|i| first_start_ps + (i as u64 * bin_width_ps) as i64).collect(),
            counts: vec![0.0; bins],
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Bin centers in ns.
    pub fn centers_ns(&self) -> Vec<f64> {
        let half = 0.5 * self.bin_width_ps as f64;
        self.bin_starts_ps.iter().map(|&s| (s as f64 + half) * 1e-3).collect()
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    fn add(&mut self, delay_ps: i64) {
        let first = self.bin_starts_ps[0];
        if delay_ps < first {
            return;
        }
        let idx = ((delay_ps - first) as u64 / self.bin_width_ps) as usize;
        if let Some(c) = self.counts.get_mut(idx) {
            *c += 1.0;
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = HISTOGRAM_HEADER.join(",");
        s.push('\n');
        for (b, c) in self.bin_starts_ps.iter().zip(&self.counts) {
            writeln!(s, "{b},{c}").expect("string write");
        }
        s
    }

    /// Parses `bin_start_ps,count`; bins must be uniform and increasing.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let rows = read_rows(text, source, &HISTOGRAM_HEADER)?;
        let mut starts = Vec::with_capacity(rows.len());
        let mut counts = Vec::with_capacity(rows.len());
        for row in &rows {
            let start: i64 = row.parse(0, source)?;
            let count: f64 = row.parse(1, source)?;
            if !(count >= 0.0 && count.is_finite()) {
                return Err(Error::parse(source, row.line, format!("count must be finite and >= 0, got {count}")));
            }
            starts.push(start);
            counts.push(count);
        }
        if starts.len() < 2 {
            return Err(Error::InsufficientData(format!("{source}: need at least two bins")));
        }
        let width = starts[1] - starts[0];
        if width <= 0 {
            return Err(Error::parse(source, rows[1].line, "bin starts must increase"));
        }
        for (i, w) in starts.windows(2).enumerate() {
            if w[1] - w[0] != width {
                return Err(Error::parse(source, rows[i + 1].line, format!("bin width changes from {width} ps")));
            }
        }
        Ok(Self {
            bin_width_ps: width as u64,
            bin_starts_ps: starts,
            counts,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&csvio::read_file(path)?, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        csvio::write_file(path, &self.to_csv())
    }
}

/// Start–stop histogram: every start is paired with the first stop after it.
///
/// With a pulse train the delays lie in `[0, window)`; in correlation mode
/// they lie in `(−window, window)`.
pub fn histogram_start_stop(stream: &TimeTagStream, sync: Sync, bin_width_ps: u64, window_ps: u64) -> Result<Histogram> {
    if bin_width_ps == 0 {
        return Err(Error::InvalidInput("bin width must be positive".into()));
    }
    if window_ps < bin_width_ps {
        return Err(Error::InvalidInput(format!(
            "window {window_ps} ps is shorter than the bin width {bin_width_ps} ps"
        )));
    }
    if stream.events.is_empty() {
        return Err(Error::EmptyStream);
    }
    let bins = window_ps.div_ceil(bin_width_ps) as usize;
    match sync {
        Sync::PulseTrain { period_ps } => {
            if !(period_ps > 0.0) {
                return Err(Error::InvalidInput(format!("pulse period must be positive, got {period_ps} ps")));
            }
            let mut h = Histogram::zeros(0, bin_width_ps, bins);
            let mut last_pulse = None;
            for e in &stream.events {
                let mut k = (e.time_ps as f64 / period_ps).floor() as u64;
                while k > 0 && pulse_time_ps(period_ps, k) > e.time_ps {
                    k -= 1;
                }
                while pulse_time_ps(period_ps, k + 1) <= e.time_ps {
                    k += 1;
                }
                if last_pulse == Some(k) {
                    continue;
                }
                last_pulse = Some(k);
                let delay = e.time_ps - pulse_time_ps(period_ps, k);
                if delay < window_ps {
                    h.add(delay as i64);
                }
            }
            Ok(h)
        }
        Sync::Channel => {
            let mut h = Histogram::zeros(-((bins as u64 * bin_width_ps) as i64), bin_width_ps, 2 * bins);
            let window = window_ps as i64;
            // armed start on each detector; a start expires after the window
            let mut pending: [Option<u64>; 2] = [None, None];
            for e in &stream.events {
                let this = (e.channel - 1) as usize;
                let other = 1 - this;
                if let Some(start) = pending[other].take() {
                    let delay = (e.time_ps - start) as i64;
                    if delay < window {
                        h.add(if this == 1 { delay } else { -delay });
                    }
                }
                if pending[this].is_none_or(|s| e.time_ps - s >= window_ps) {
                    pending[this] = Some(e.time_ps);
                }
            }
            // drop the part of the negative range beyond the window
            let keep = h.bin_starts_ps.iter().position(|&s| s + bin_width_ps as i64 > -window).unwrap_or(0);
            h.bin_starts_ps.drain(..keep);
            h.counts.drain(..keep);
            Ok(h)
        }
    }
}

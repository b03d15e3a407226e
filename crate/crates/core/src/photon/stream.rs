//! Three-level emitter kinetics and simulated two-detector time-tag streams.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::csvio::{self, read_rows};
use crate::error::{Error, Result};

/// Ground, excited and metastable (shelving) levels; all rates in 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelModel {
    pub pump_rate: f64,
    pub radiative_rate: f64,
    pub isc_rate: f64,
    pub metastable_rate: f64,
    pub detection_efficiency: f64,
    /// dark and stray counts, per detector
    pub background_rate: f64,
}

impl ThreeLevelModel {
    pub fn new(
        pump_rate: f64,
        radiative_rate: f64,
        isc_rate: f64,
        metastable_rate: f64,
        detection_efficiency: f64,
        background_rate: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("pump_rate", pump_rate),
            ("isc_rate", isc_rate),
            ("metastable_rate", metastable_rate),
            ("background_rate", background_rate),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(radiative_rate > 0.0 && radiative_rate.is_finite()) {
            return Err(Error::InvalidInput(format!("radiative_rate must be > 0, got {radiative_rate}")));
        }
        if !(0.0..=1.0).contains(&detection_efficiency) {
            return Err(Error::InvalidInput(format!(
                "detection_efficiency must lie in [0, 1], got {detection_efficiency}"
            )));
        }
        if isc_rate > 0.0 && metastable_rate == 0.0 {
            return Err(Error::InvalidInput("shelving without a return rate traps the emitter".into()));
        }
        Ok(Self {
            pump_rate,
            radiative_rate,
            isc_rate,
            metastable_rate,
            detection_efficiency,
            background_rate,
        })
    }

    /// Excited-state lifetime `1/(k_r + k_isc)`, s.
    pub fn lifetime(&self) -> f64 {
        1.0 / (self.radiative_rate + self.isc_rate)
    }

    /// Steady-state populations (ground, excited, metastable) under CW pumping.
    pub fn steady_state(&self) -> (f64, f64, f64) {
        let e_over_g = self.pump_rate / (self.radiative_rate + self.isc_rate);
        let s_over_g = if self.isc_rate > 0.0 {
            self.isc_rate * e_over_g / self.metastable_rate
        } else {
            0.0
        };
        let g = 1.0 / (1.0 + e_over_g + s_over_g);
        (g, g * e_over_g, g * s_over_g)
    }

    /// Mean detected count rate of one detector under CW pumping, 1/s.
    pub fn cw_count_rate_per_channel(&self) -> f64 {
        let (_, e, _) = self.steady_state();
        0.5 * self.detection_efficiency * self.radiative_rate * e + self.background_rate
    }

    /// Emitter `g²(τ) = 1 − (1 + a)e^{−|τ|/τ₁} + a e^{−|τ|/τ₂}` under CW
    /// pumping, from the rate equations started in the ground state:
    /// `(a, τ₁, τ₂)` with the times in s.
    pub fn cw_g2_parameters(&self) -> (f64, f64, f64) {
        let k12 = self.pump_rate;
        let k21 = self.radiative_rate;
        let k23 = self.isc_rate;
        let k31 = self.metastable_rate;
        let trace = k12 + k21 + k23 + k31;
        let det = k12 * (k23 + k31) + k31 * (k21 + k23);
        let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
        let l1 = 0.5 * (trace + disc);
        let l2 = det / l1;
        let (_, e, _) = self.steady_state();
        // p₂(0) = 0 and p₂'(0) = k₁₂ fix both amplitudes
        let a = (k12 / e - l1) / (l1 - l2);
        (a, 1.0 / l1, 1.0 / l2)
    }
}

/// Excitation scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpMode {
    Cw,
    /// pulse train at `rep_rate` (Hz) of pulses `pulse_width` (s) long
    Pulsed { rep_rate: f64, pulse_width: f64 },
}

impl PumpMode {
    pub fn period_ps(&self) -> Option<f64> {
        match *self {
            PumpMode::Cw => None,
            PumpMode::Pulsed { rep_rate, .. } => Some(1e12 / rep_rate),
        }
    }
}

/// One detection: detector `channel` (1 or 2) at `time_ps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeTag {
    pub time_ps: u64,
    pub channel: u8,
}

/// Time-ordered detections over `[0, duration_ps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTagStream {
    pub events: Vec<TimeTag>,
    pub duration_ps: u64,
    pub seed: u64,
    /// excitation period for pulsed runs; pulse `k` fires at `round(k · period)`
    pub pulse_period_ps: Option<f64>,
}

pub const STREAM_HEADER: [&str; 2] = ["channel", "time_ps"];

/// Time of excitation pulse `k` in integer picoseconds.
pub fn pulse_time_ps(period_ps: f64, k: u64) -> u64 {
    (k as f64 * period_ps).round() as u64
}

fn to_ps(t: f64) -> u64 {
    (t * 1e12).round() as u64
}

/// Kinetic Monte-Carlo trajectory of the emitter with both detectors.
///
/// Each radiative decay is detected with probability
/// `detection_efficiency` and then routed to either detector with equal
/// odds; each detector also sees an independent Poisson background. A pulse
/// is treated as instantaneous and excites a ground-state emitter with
/// probability `1 − exp(−pump_rate · pulse_width)`.
pub fn simulate_stream(model: &ThreeLevelModel, mode: PumpMode, duration_s: f64, seed: u64) -> Result<TimeTagStream> {
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::InvalidInput(format!("duration must be positive, got {duration_s} s")));
    }
    if let PumpMode::Pulsed { rep_rate, pulse_width } = mode {
        if !(rep_rate > 0.0 && rep_rate.is_finite() && pulse_width >= 0.0 && pulse_width.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pulsed pump needs rep_rate > 0 and pulse_width >= 0, got {rep_rate} Hz, {pulse_width} s"
            )));
        }
        if pulse_width * rep_rate >= 1.0 {
            return Err(Error::InvalidInput("pulse width exceeds the pulse period".into()));
        }
    }
    let duration_ps = to_ps(duration_s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    emitter_photons(model, mode, duration_s, duration_ps, &mut rng, &mut events);
    if model.background_rate > 0.0 {
        let exp = Exp::new(model.background_rate).expect("positive rate");
        for channel in [1u8, 2] {
            let mut t = 0.0;
            loop {
                t += exp.sample(&mut rng);
                let ps = to_ps(t);
                if ps >= duration_ps {
                    break;
                }
                events.push(TimeTag { time_ps: ps, channel });
            }
        }
    }
    events.sort_unstable();
    Ok(TimeTagStream {
        events,
        duration_ps,
        seed,
        pulse_period_ps: mode.period_ps(),
    })
}

fn emitter_photons(
    model: &ThreeLevelModel,
    mode: PumpMode,
    duration_s: f64,
    duration_ps: u64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<TimeTag>,
) {
    let eta = model.detection_efficiency;
    let decay_total = model.radiative_rate + model.isc_rate;
    let p_radiative = model.radiative_rate / decay_total;
    let decay = Exp::new(decay_total).expect("positive rate");
    let emit = |t_ps: u64, rng: &mut ChaCha8Rng, out: &mut Vec<TimeTag>| {
        if t_ps < duration_ps && rng.gen::<f64>() < eta {
            let channel = if rng.gen::<bool>() { 1 } else { 2 };
            out.push(TimeTag { time_ps: t_ps, channel });
        }
    };
    match mode {
        PumpMode::Cw => {
            if model.pump_rate == 0.0 {
                return;
            }
            let pump = Exp::new(model.pump_rate).expect("positive rate");
            let mut t = 0.0;
            loop {
                t += pump.sample(rng);
                if t >= duration_s {
                    break;
                }
                t += decay.sample(rng);
                if rng.gen::<f64>() < p_radiative {
                    emit(to_ps(t), rng, out);
                } else {
                    t += Exp::new(model.metastable_rate).expect("positive rate").sample(rng);
                }
            }
        }
        PumpMode::Pulsed { rep_rate, pulse_width } => {
            // ln(1 − p_exc) per pulse
            let log_miss = -model.pump_rate * pulse_width;
            if log_miss == 0.0 {
                return;
            }
            let period_ps = 1e12 / rep_rate;
            let pulses = (duration_s * rep_rate).ceil() as u64;
            let mut k = 0u64;
            while k < pulses {
                // failed pulses before the next excitation
                let u: f64 = rng.gen();
                k += ((1.0 - u).ln() / log_miss).floor() as u64;
                if k >= pulses {
                    break;
                }
                let mut t = pulse_time_ps(period_ps, k) as f64 * 1e-12 + decay.sample(rng);
                if rng.gen::<f64>() < p_radiative {
                    emit(to_ps(t), rng, out);
                } else {
                    t += Exp::new(model.metastable_rate).expect("positive rate").sample(rng);
                }
                k = first_pulse_after(period_ps, t * 1e12).max(k + 1);
            }
        }
    }
}

/// Index of the first pulse firing strictly after `t_ps`.
fn first_pulse_after(period_ps: f64, t_ps: f64) -> u64 {
    let mut k = (t_ps / period_ps).floor().max(0.0) as u64;
    while k > 0 && pulse_time_ps(period_ps, k - 1) as f64 > t_ps {
        k -= 1;
    }
    while pulse_time_ps(period_ps, k) as f64 <= t_ps {
        k += 1;
    }
    k
}

impl TimeTagStream {
    pub fn channel_counts(&self) -> [usize; 2] {
        let ones = self.events.iter().filter(|e| e.channel == 1).count();
        [ones, self.events.len() - ones]
    }

    /// CSV `channel,time_ps` preceded by `#` lines carrying the run metadata.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(16 * self.events.len() + 128);
        writeln!(s, "# duration_ps = {}", self.duration_ps).expect("string write");
        writeln!(s, "# seed = {}", self.seed).expect("string write");
        if let Some(p) = self.pulse_period_ps {
            writeln!(s, "# pulse_period_ps = {p:?}").expect("string write");
        }
        s.push_str("channel,time_ps\n");
        for e in &self.events {
            writeln!(s, "{},{}", e.channel, e.time_ps).expect("string write");
        }
        s
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut duration_ps = None;
        let mut seed = 0;
        let mut pulse_period_ps = None;
        for (idx, line) in text.lines().enumerate() {
            let Some(meta) = line.trim().strip_prefix('#') else {
                continue;
            };
            let Some((key, value)) = meta.split_once('=') else {
                continue;
            };
            let bad = || Error::parse(source, idx + 1, format!("bad value {:?}", value.trim()));
            match key.trim() {
                "duration_ps" => duration_ps = Some(value.trim().parse::<u64>().map_err(|_| bad())?),
                "seed" => seed = value.trim().parse::<u64>().map_err(|_| bad())?,
                "pulse_period_ps" => pulse_period_ps = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
                _ => {}
            }
        }
        let rows = read_rows(text, source, &STREAM_HEADER)?;
        let mut events = Vec::with_capacity(rows.len());
        let mut last = 0;
        for row in &rows {
            let channel: u8 = row.parse(0, source)?;
            if channel != 1 && channel != 2 {
                return Err(Error::parse(source, row.line, format!("channel must be 1 or 2, got {channel}")));
            }
            let time_ps: u64 = row.parse(1, source)?;
            if time_ps < last {
                return Err(Error::parse(source, row.line, "time stamps must be non-decreasing"));
            }
            last = time_ps;
            events.push(TimeTag { time_ps, channel });
        }
        let duration_ps = duration_ps.unwrap_or_else(|| events.last().map_or(0, |e| e.time_ps + 1));
        if let Some(e) = events.last() {
            if e.time_ps >= duration_ps {
                return Err(Error::parse(source, rows.last().map_or(0, |r| r.line), "time stamp beyond the duration"));
            }
        }
        Ok(Self {
            events,
            duration_ps,
            seed,
            pulse_period_ps,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&csvio::read_file(path)?, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        csvio::write_file(path, &self.to_csv())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nv(pump: f64, eta: f64, bg: f64) -> ThreeLevelModel {
        ThreeLevelModel::new(pump, 1.0 / 17.3e-9, 1.0 / 300e-9, 1.0 / 250e-9, eta, bg).unwrap()
    }

    #[test]
    fn constructor_rejects_dark_emitter() {
        assert!(ThreeLevelModel::new(1e6, 0.0, 0.0, 0.0, 0.1, 0.0).is_err());
        assert!(ThreeLevelModel::new(1e6, 1e8, 0.0, 0.0, 1.5, 0.0).is_err());
        assert!(ThreeLevelModel::new(-1.0, 1e8, 0.0, 0.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn steady_state_sums_to_one_and_balances() {
        let m = nv(2e7, 0.1, 0.0);
        let (g, e, s) = m.steady_state();
        assert!((g + e + s - 1.0).abs() < 1e-15);
        assert!((m.pump_rate * g - (m.radiative_rate + m.isc_rate) * e).abs() < 1e-9 * m.pump_rate);
        assert!((m.isc_rate * e - m.metastable_rate * s).abs() < 1e-9 * m.pump_rate);
    }

    #[test]
    fn g2_parameters_from_rate_equations() {
        let two_level = ThreeLevelModel::new(2e7, 1.0 / 17.3e-9, 0.0, 1e6, 0.1, 0.0).unwrap();
        let (a, t1, _) = two_level.cw_g2_parameters();
        assert!(a.abs() < 1e-12);
        assert!((t1 * (2e7 + 1.0 / 17.3e-9) - 1.0).abs() < 1e-12);
        // the emitter's g² is the excited population after a reset to the
        // ground state; integrate the rate equations with small Euler steps
        let m = nv(2e7, 0.1, 0.0);
        let (a, t1, t2) = m.cw_g2_parameters();
        assert!(a > 0.0 && t1 < t2);
        let (_, e_inf, _) = m.steady_state();
        let (mut g, mut e, mut s) = (1.0, 0.0, 0.0);
        let dt = 1e-13;
        for step in 1..=400_000 {
            let dg = -m.pump_rate * g + m.radiative_rate * e + m.metastable_rate * s;
            let de = m.pump_rate * g - (m.radiative_rate + m.isc_rate) * e;
            let ds = m.isc_rate * e - m.metastable_rate * s;
            g += dg * dt;
            e += de * dt;
            s += ds * dt;
            if step % 100_000 == 0 {
                let tau = step as f64 * dt;
                let g2 = 1.0 - (1.0 + a) * (-tau / t1).exp() + a * (-tau / t2).exp();
                assert!((e / e_inf - g2).abs() < 1e-4, "{tau}: {} vs {g2}", e / e_inf);
            }
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let m = nv(2e7, 0.05, 1e3);
        let a = simulate_stream(&m, PumpMode::Cw, 2e-3, 7).unwrap();
        let b = simulate_stream(&m, PumpMode::Cw, 2e-3, 7).unwrap();
        let c = simulate_stream(&m, PumpMode::Cw, 2e-3, 8).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn times_ordered_and_bounded() {
        let m = nv(1e12, 0.3, 1e4);
        let s = simulate_stream(&m, PumpMode::Pulsed { rep_rate: 5.05e6, pulse_width: 4.6e-12 }, 1e-3, 1).unwrap();
        assert!(s.events.windows(2).all(|w| w[0].time_ps <= w[1].time_ps));
        assert!(s.events.iter().all(|e| e.time_ps < s.duration_ps));
        assert!(!s.events.is_empty());
    }

    #[test]
    fn background_only_is_poisson() {
        let m = ThreeLevelModel::new(0.0, 1e8, 0.0, 0.0, 0.0, 2e5).unwrap();
        let s = simulate_stream(&m, PumpMode::Cw, 0.05, 3).unwrap();
        let mean = 2e5 * 0.05;
        for n in s.channel_counts() {
            assert!((n as f64 - mean).abs() < 4.0 * mean.sqrt(), "{n} vs {mean}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let m = nv(1e12, 0.3, 1e4);
        let s = simulate_stream(&m, PumpMode::Pulsed { rep_rate: 5.05e6, pulse_width: 4.6e-12 }, 2e-4, 11).unwrap();
        let back = TimeTagStream::parse(&s.to_csv(), "s.csv").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_errors_name_line() {
        let e = TimeTagStream::parse("channel,time_ps\n1,10\n3,20\n", "t.csv").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = TimeTagStream::parse("channel,time_ps\n1,10\n2,5\n", "t.csv").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    }
}

//! Command-line front end.
//!
//! Every command prints `key = value` lines (numbers to six significant
//! digits) and exits 0 on success, 2 on usage errors, 3 on numerical
//! failures and 4 on file errors. Failures print one line:
//! `error kind=<kind> exit=<code> message="<text>"`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::config::read_key_values;
use crate::coupling::map::{enhancement_map, linspace, EnhancementMap, MapMetadata};
use crate::coupling::table::{bundled_records, predict_table, read_records, records_to_csv};
use crate::coupling::{band_averaged_total, total_rate_enhancement, EmitterConfig, Orientation};
use crate::csvio::{self, fmt6};
use crate::error::Error;
use crate::materials::{fit_drude, DrudeParameters, OpticalConstantTable};
use crate::mode::{mode_fields, solve_fundamental_mode, WireGeometry};
use crate::photon::fit::G2_NORMALIZATION_NS;
use crate::photon::histogram::{G2_BIN_PS, LIFETIME_BIN_PS};
use crate::photon::{
    bundled_g2_histogram, fit_g2, fit_lifetime, histogram_start_stop, simulate_stream, Histogram, LifetimeWindow, PumpMode, Sync,
    ThreeLevelModel, TimeTagStream,
};

/// Filter window of the optional band average, nm.
pub const BAND_NM: (f64, f64) = (647.0, 785.0);

#[derive(Parser, Debug)]
#[command(name = "nvwire", version, about = "Emitter coupling to a metal-nanowire plasmon, and photon statistics")]
#[command(args_override_self = true)]
struct Cli {
    /// flat `key = value` file of flag defaults (keys are long flag names); flags given on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fundamental plasmon mode of the wire: effective index and propagation length
    #[command(allow_negative_numbers = true)]
    Mode(ModeArgs),
    /// Decay-rate enhancement and its channels for one emitter position
    #[command(allow_negative_numbers = true)]
    Enhance(EnhanceArgs),
    /// Enhancement over a diameter x distance grid, written as CSV
    #[command(allow_negative_numbers = true)]
    Map(MapArgs),
    /// Predicted minimum enhancement for measured wire/crystal systems
    #[command(allow_negative_numbers = true)]
    Table(TableArgs),
    /// Drude fit to tabulated optical constants
    #[command(allow_negative_numbers = true)]
    DrudeFit(DrudeFitArgs),
    /// Monte-Carlo time tags of a pumped three-level emitter
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Single-exponential lifetime fit of a stream or lifetime histogram
    #[command(allow_negative_numbers = true)]
    FitLifetime(FitLifetimeArgs),
    /// Antibunching fit of a stream or correlation histogram
    #[command(allow_negative_numbers = true)]
    FitG2(FitG2Args),
}

#[derive(Args, Debug, Clone)]
struct MaterialArgs {
    /// vacuum wavelength, nm
    #[arg(long, default_value_t = 700.0, value_name = "NM")]
    wavelength_nm: f64,
    /// relative permittivity of the surrounding dielectric
    #[arg(long, default_value_t = 3.0)]
    eps1: f64,
    /// metal permittivity as `re+imi`; replaces the Drude model
    #[arg(long, value_name = "COMPLEX", allow_hyphen_values = true)]
    eps_metal: Option<String>,
    /// Drude background permittivity (default: fit to the bundled silver data)
    #[arg(long)]
    eps_inf: Option<f64>,
    /// Drude plasma energy, eV
    #[arg(long, value_name = "EV")]
    hbar_omega_p_ev: Option<f64>,
    /// Drude damping energy, eV
    #[arg(long, value_name = "EV")]
    hbar_gamma_ev: Option<f64>,
}

impl MaterialArgs {
    fn drude(&self) -> Result<DrudeParameters, Error> {
        let d = DrudeParameters::silver_default();
        DrudeParameters::from_ev(
            self.eps_inf.unwrap_or(d.eps_inf),
            self.hbar_omega_p_ev.unwrap_or(d.hbar_omega_p_ev()),
            self.hbar_gamma_ev.unwrap_or(d.hbar_gamma_ev()),
        )
    }

    fn eps_metal(&self) -> Result<Complex64, Error> {
        match &self.eps_metal {
            Some(s) => s
                .trim()
                .parse::<Complex64>()
                .map_err(|_| Error::InvalidInput(format!("cannot parse metal permittivity {s:?}"))),
            None => Ok(self.drude()?.epsilon(self.wavelength_nm)),
        }
    }

    fn geometry(&self, radius_nm: f64) -> Result<WireGeometry, Error> {
        WireGeometry::new(radius_nm / 1e9, self.eps_metal()?, self.eps1)
    }
}

#[derive(Args, Debug)]
struct ModeArgs {
    /// wire radius, nm
    #[arg(long, value_name = "NM")]
    radius_nm: f64,
    #[command(flatten)]
    material: MaterialArgs,
    /// write the mode summary as CSV
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// write the field profile E_r, E_z, H_phi from the axis to radius + 200 nm as CSV
    #[arg(long, value_name = "FILE")]
    profile_csv: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OrientationArg {
    Radial,
    Axial,
    Azimuthal,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Radial => Orientation::Radial,
            OrientationArg::Axial => Orientation::Axial,
            OrientationArg::Azimuthal => Orientation::Azimuthal,
        }
    }
}

#[derive(Args, Debug)]
struct EnhanceArgs {
    /// wire diameter, nm
    #[arg(long, value_name = "NM")]
    diameter_nm: f64,
    /// gap between wire surface and emitter, nm
    #[arg(long, value_name = "NM")]
    dprime_nm: f64,
    /// dipole orientation
    #[arg(long, value_enum, default_value = "radial")]
    orientation: OrientationArg,
    #[command(flatten)]
    material: MaterialArgs,
    /// also average the total over the 647-785 nm detection band (Drude permittivity)
    #[arg(long)]
    band_average: bool,
    /// wavelengths sampled by the band average
    #[arg(long, default_value_t = 8)]
    band_samples: usize,
}

#[derive(Args, Debug)]
struct MapArgs {
    /// diameters, nm: `start:stop:count` or a comma list
    #[arg(long, default_value = "30:80:26", value_name = "NM")]
    diameters: String,
    /// wire-emitter gaps, nm: `start:stop:count` or a comma list
    #[arg(long, default_value = "5:60:23", value_name = "NM")]
    distances: String,
    #[arg(long, value_enum, default_value = "radial")]
    orientation: OrientationArg,
    /// vacuum wavelength, nm
    #[arg(long, default_value_t = 700.0, value_name = "NM")]
    wavelength_nm: f64,
    /// relative permittivity of the surrounding dielectric
    #[arg(long, default_value_t = 3.0)]
    eps1: f64,
    /// Drude background permittivity
    #[arg(long)]
    eps_inf: Option<f64>,
    /// Drude plasma energy, eV
    #[arg(long, value_name = "EV")]
    hbar_omega_p_ev: Option<f64>,
    /// Drude damping energy, eV
    #[arg(long, value_name = "EV")]
    hbar_gamma_ev: Option<f64>,
    /// grid CSV; the metadata goes to `<FILE>.meta`
    #[arg(long, default_value = "map.csv", value_name = "FILE")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// records CSV (default: the bundled measured systems)
    #[arg(long, value_name = "FILE")]
    records: Option<PathBuf>,
    /// write the full-precision table CSV here
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Drude background permittivity
    #[arg(long)]
    eps_inf: Option<f64>,
    /// Drude plasma energy, eV
    #[arg(long, value_name = "EV")]
    hbar_omega_p_ev: Option<f64>,
    /// Drude damping energy, eV
    #[arg(long, value_name = "EV")]
    hbar_gamma_ev: Option<f64>,
}

#[derive(Args, Debug)]
struct DrudeFitArgs {
    /// optical-constant CSV `wavelength_nm,eps_re,eps_im` (default: bundled silver data)
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    /// shortest fitted wavelength, nm
    #[arg(long, default_value_t = 600.0, value_name = "NM")]
    min_nm: f64,
    /// longest fitted wavelength, nm
    #[arg(long, default_value_t = 800.0, value_name = "NM")]
    max_nm: f64,
    /// write the parameters as a config file usable with --config
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum PumpArg {
    Cw,
    Pulsed,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// random seed (required for reproducibility)
    #[arg(long)]
    seed: u64,
    /// simulated time, s
    #[arg(long, value_name = "S")]
    duration_s: f64,
    #[arg(long, value_enum, default_value = "pulsed")]
    pump: PumpArg,
    /// pulse repetition rate, MHz
    #[arg(long, default_value_t = 5.05, value_name = "MHZ")]
    rep_rate_mhz: f64,
    /// pulse width, ps
    #[arg(long, default_value_t = 4.6, value_name = "PS")]
    pulse_width_ps: f64,
    /// excitation rate while pumped, MHz
    #[arg(long, default_value_t = 1e6, value_name = "MHZ")]
    pump_rate_mhz: f64,
    /// radiative lifetime 1/k_r, ns
    #[arg(long, default_value_t = 17.3, value_name = "NS")]
    lifetime_ns: f64,
    /// shelving rate into the metastable level, MHz
    #[arg(long, default_value_t = 0.0, value_name = "MHZ")]
    isc_rate_mhz: f64,
    /// return rate from the metastable level, MHz
    #[arg(long, default_value_t = 4.0, value_name = "MHZ")]
    metastable_rate_mhz: f64,
    /// probability that an emitted photon is detected
    #[arg(long, default_value_t = 0.05)]
    detection_efficiency: f64,
    /// background counts per detector, Hz
    #[arg(long, default_value_t = 0.0, value_name = "HZ")]
    background_rate_hz: f64,
    /// time-tag CSV `channel,time_ps`
    #[arg(long, default_value = "stream.csv", value_name = "FILE")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct FitLifetimeArgs {
    /// time-tag CSV or lifetime histogram CSV `bin_start_ps,count`
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// pulse repetition rate, MHz; used when the stream does not record its period
    #[arg(long, default_value_t = 5.05, value_name = "MHZ")]
    rep_rate_mhz: f64,
    /// histogram bin width for stream input, ps
    #[arg(long, default_value_t = LIFETIME_BIN_PS, value_name = "PS")]
    bin_ps: u64,
    /// first fitted delay after the histogram peak, ns
    #[arg(long, default_value_t = 1.0, value_name = "NS")]
    start_after_peak_ns: f64,
    /// last fitted delay, ns (default: 80 % of the pulse period)
    #[arg(long, value_name = "NS")]
    end_ns: Option<f64>,
    /// also write the histogram built from a stream
    #[arg(long, value_name = "FILE")]
    histogram_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitG2Args {
    /// time-tag CSV or correlation histogram CSV (default: bundled single-emitter histogram)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// histogram bin width for stream input, ps
    #[arg(long, default_value_t = G2_BIN_PS, value_name = "PS")]
    bin_ps: u64,
    /// largest |delay| histogrammed from a stream, ps
    #[arg(long, default_value_t = 600_000, value_name = "PS")]
    window_ps: u64,
    /// inner edge of the normalization wings, ns
    #[arg(long, default_value_t = G2_NORMALIZATION_NS.0, value_name = "NS")]
    norm_min_ns: f64,
    /// outer edge of the normalization wings, ns
    #[arg(long, default_value_t = G2_NORMALIZATION_NS.1, value_name = "NS")]
    norm_max_ns: f64,
    /// also write the histogram built from a stream
    #[arg(long, value_name = "FILE")]
    histogram_out: Option<PathBuf>,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) => 2,
        Error::Io { .. } | Error::Parse { .. } => 4,
        _ => 3,
    }
}

fn error_line(kind: &str, code: i32, message: &str) -> String {
    let flat = message.split_whitespace().collect::<Vec<_>>().join(" ");
    format!("error kind={kind} exit={code} message=\"{}\"", flat.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Inserts `--key value` pairs from the config file right after the
/// subcommand, so that flags given explicitly (which come later) win.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, Error> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    if let Some(prog) = iter.next() {
        rest.push(prog);
    }
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let path = iter
                .next()
                .ok_or_else(|| Error::InvalidInput("--config needs a file".into()))?;
            config = Some(PathBuf::from(path));
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let kv = read_key_values(&path)?;
    let Some(pos) = rest.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        return Ok(rest);
    };
    let mut injected = Vec::new();
    for (key, value) in kv {
        match value.as_str() {
            "true" => injected.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => {
                injected.push(OsString::from(format!("--{key}")));
                injected.push(OsString::from(value));
            }
        }
    }
    let at = pos + 2;
    rest.splice(at..at, injected);
    Ok(rest)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Reports go to `out`, error lines to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(err, "{}", error_line(e.kind(), code, &e.to_string()));
            return code;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let message: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .map(|l| l.trim().trim_start_matches("error: "))
                .filter(|l| !l.is_empty())
                .collect();
            let _ = writeln!(err, "{}", error_line("usage", 2, &message.join(" ")));
            return 2;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(err, "{}", error_line(e.kind(), code, &e.to_string()));
            code
        }
    }
}

fn kv(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> Result<(), Error> {
    writeln!(out, "{key} = {value}").map_err(|e| Error::io("<stdout>", e))
}

fn num(out: &mut dyn Write, key: &str, value: f64) -> Result<(), Error> {
    kv(out, key, fmt6(value))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Error> {
    match command {
        Command::Mode(a) => cmd_mode(&a, out),
        Command::Enhance(a) => cmd_enhance(&a, out),
        Command::Map(a) => cmd_map(&a, out),
        Command::Table(a) => cmd_table(&a, out),
        Command::DrudeFit(a) => cmd_drude_fit(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::FitLifetime(a) => cmd_fit_lifetime(&a, out),
        Command::FitG2(a) => cmd_fit_g2(&a, out),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Error> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}

fn cmd_mode(a: &ModeArgs, out: &mut dyn Write) -> Result<i32, Error> {
    positive("--radius-nm", a.radius_nm)?;
    positive("--wavelength-nm", a.material.wavelength_nm)?;
    let geometry = a.material.geometry(a.radius_nm)?;
    let mode = solve_fundamental_mode(&geometry, a.material.wavelength_nm / 1e9)?;
    num(out, "n_eff_re", mode.n_eff.re)?;
    num(out, "n_eff_im", mode.n_eff.im)?;
    num(out, "propagation_length_um", mode.propagation_length * 1e6)?;
    num(out, "eps_metal_re", geometry.eps_metal.re)?;
    num(out, "eps_metal_im", geometry.eps_metal.im)?;
    num(out, "relative_residual", mode.relative_residual)?;
    kv(out, "winding_number", mode.certified_winding)?;
    if let Some(path) = &a.csv {
        let text = format!(
            "radius_nm,wavelength_nm,eps1,eps_metal_re,eps_metal_im,n_eff_re,n_eff_im,propagation_length_um\n\
             {:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n",
            a.radius_nm,
            a.material.wavelength_nm,
            a.material.eps1,
            geometry.eps_metal.re,
            geometry.eps_metal.im,
            mode.n_eff.re,
            mode.n_eff.im,
            mode.propagation_length * 1e6
        );
        csvio::write_file(path, &text)?;
    }
    if let Some(path) = &a.profile_csv {
        let mut text = String::from("r_nm,e_r_re,e_r_im,e_z_re,e_z_im,h_phi_re,h_phi_im\n");
        let outer = a.radius_nm + 200.0;
        for i in 0..=400 {
            let r = outer * i as f64 / 400.0;
            let f = mode_fields(&mode, r / 1e9)?;
            text.push_str(&format!(
                "{r:?},{:?},{:?},{:?},{:?},{:?},{:?}\n",
                f.e_r.re, f.e_r.im, f.e_z.re, f.e_z.im, f.h_phi.re, f.h_phi.im
            ));
        }
        csvio::write_file(path, &text)?;
    }
    Ok(0)
}

fn cmd_enhance(a: &EnhanceArgs, out: &mut dyn Write) -> Result<i32, Error> {
    positive("--diameter-nm", a.diameter_nm)?;
    positive("--dprime-nm", a.dprime_nm)?;
    positive("--wavelength-nm", a.material.wavelength_nm)?;
    let geometry = a.material.geometry(0.5 * a.diameter_nm)?;
    let wavelength = a.material.wavelength_nm / 1e9;
    let emitter = EmitterConfig::new(a.dprime_nm / 1e9, a.orientation.into(), wavelength, a.material.eps1)?;
    let r = total_rate_enhancement(&geometry, &emitter)?;
    num(out, "total", r.total)?;
    num(out, "gamma_pl", r.gamma_pl)?;
    num(out, "gamma_rad", r.gamma_rad)?;
    num(out, "gamma_nr", r.gamma_nr)?;
    num(out, "beta", r.beta)?;
    match r.n_eff {
        Some(n) => {
            num(out, "n_eff_re", n.re)?;
            num(out, "n_eff_im", n.im)?;
        }
        None => kv(out, "n_eff", "none")?,
    }
    kv(out, "max_order", r.max_order)?;
    num(out, "error_bound", r.error_bound)?;
    if a.band_average {
        let total = band_averaged_total(
            0.5 * a.diameter_nm / 1e9,
            &a.material.drude()?,
            &emitter,
            (BAND_NM.0 / 1e9, BAND_NM.1 / 1e9),
            a.band_samples,
        )?;
        num(out, "total_band_average", total)?;
    }
    Ok(0)
}

fn parse_axis(spec: &str, name: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::InvalidInput(format!("cannot parse {name} {spec:?}; use start:stop:count or a comma list"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 {
            return Err(bad());
        }
        return Ok(linspace(start, stop, count));
    }
    spec.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect()
}

fn drude_from(eps_inf: Option<f64>, wp: Option<f64>, g: Option<f64>) -> Result<DrudeParameters, Error> {
    let d = DrudeParameters::silver_default();
    DrudeParameters::from_ev(
        eps_inf.unwrap_or(d.eps_inf),
        wp.unwrap_or(d.hbar_omega_p_ev()),
        g.unwrap_or(d.hbar_gamma_ev()),
    )
}

fn cmd_map(a: &MapArgs, out: &mut dyn Write) -> Result<i32, Error> {
    positive("--wavelength-nm", a.wavelength_nm)?;
    let diameters = parse_axis(&a.diameters, "--diameters")?;
    let distances = parse_axis(&a.distances, "--distances")?;
    let metadata = MapMetadata {
        wavelength_nm: a.wavelength_nm,
        eps1: a.eps1,
        orientation: a.orientation.into(),
        drude: drude_from(a.eps_inf, a.hbar_omega_p_ev, a.hbar_gamma_ev)?,
    };
    let map = enhancement_map(&diameters, &distances, metadata)?;
    map.write(&a.output)?;
    let finite = map.total.iter().flatten().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    kv(out, "rows", map.diameter_axis.len())?;
    kv(out, "cols", map.distance_axis.len())?;
    num(out, "total_min", lo)?;
    num(out, "total_max", hi)?;
    kv(out, "failed_cells", map.cell_errors.len())?;
    kv(out, "output", a.output.display())?;
    kv(out, "metadata", EnhancementMap::sidecar_path(&a.output).display())?;
    if let Some(first) = map.cell_errors.first() {
        return Err(Error::Range(format!(
            "{} map cells failed; first at row {} col {}: {}",
            map.cell_errors.len(),
            first.row,
            first.col,
            first.message
        )));
    }
    Ok(0)
}

fn cmd_table(a: &TableArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let records = match &a.records {
        Some(p) => read_records(p)?,
        None => bundled_records(),
    };
    let drude = drude_from(a.eps_inf, a.hbar_omega_p_ev, a.hbar_gamma_ev)?;
    let predicted = predict_table(&records, &drude)?;
    writeln!(
        out,
        "wire_diameter_nm,diamond_height_nm,measured_enhancement,measured_error,reported_min_enhancement,predicted_min_enhancement"
    )
    .map_err(|e| Error::io("<stdout>", e))?;
    for r in &predicted {
        let opt = |v: Option<f64>| v.map(fmt6).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt6(r.wire_diameter_nm),
            fmt6(r.diamond_height_nm),
            fmt6(r.measured_enhancement),
            fmt6(r.measured_error),
            opt(r.reported_min_enhancement),
            opt(r.predicted_min_enhancement)
        )
        .map_err(|e| Error::io("<stdout>", e))?;
    }
    if let Some(p) = &a.output {
        csvio::write_file(p, &records_to_csv(&predicted))?;
    }
    Ok(0)
}

fn cmd_drude_fit(a: &DrudeFitArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let table = match &a.table {
        Some(p) => OpticalConstantTable::from_csv_path(p)?,
        None => OpticalConstantTable::bundled_silver(),
    };
    let fit = fit_drude(&table, (a.min_nm, a.max_nm))?;
    let p = fit.params;
    num(out, "eps_inf", p.eps_inf)?;
    num(out, "hbar_omega_p_ev", p.hbar_omega_p_ev())?;
    num(out, "hbar_gamma_ev", p.hbar_gamma_ev())?;
    num(out, "max_relative_residual", fit.max_residual())?;
    for (wl, r) in &fit.residuals {
        num(out, &format!("relative_residual_{}nm", fmt6(*wl)), *r)?;
    }
    let eps = p.epsilon(700.0);
    num(out, "eps_700nm_re", eps.re)?;
    num(out, "eps_700nm_im", eps.im)?;
    if let Some(path) = &a.output {
        let text = format!(
            "eps-inf = {:?}\nhbar-omega-p-ev = {:?}\nhbar-gamma-ev = {:?}\n",
            p.eps_inf,
            p.hbar_omega_p_ev(),
            p.hbar_gamma_ev()
        );
        csvio::write_file(path, &text)?;
    }
    Ok(0)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<i32, Error> {
    positive("--lifetime-ns", a.lifetime_ns)?;
    let model = ThreeLevelModel::new(
        a.pump_rate_mhz * 1e6,
        1e9 / a.lifetime_ns,
        a.isc_rate_mhz * 1e6,
        a.metastable_rate_mhz * 1e6,
        a.detection_efficiency,
        a.background_rate_hz,
    )?;
    let mode = match a.pump {
        PumpArg::Cw => PumpMode::Cw,
        PumpArg::Pulsed => PumpMode::Pulsed {
            rep_rate: positive("--rep-rate-mhz", a.rep_rate_mhz)? * 1e6,
            pulse_width: a.pulse_width_ps * 1e-12,
        },
    };
    let stream = simulate_stream(&model, mode, a.duration_s, a.seed)?;
    stream.write(&a.output)?;
    let [c1, c2] = stream.channel_counts();
    kv(out, "events", stream.events.len())?;
    kv(out, "channel1_events", c1)?;
    kv(out, "channel2_events", c2)?;
    kv(out, "duration_ps", stream.duration_ps)?;
    kv(out, "seed", stream.seed)?;
    if a.pump == PumpArg::Cw {
        num(out, "analytic_rate_per_channel_hz", model.cw_count_rate_per_channel())?;
    }
    kv(out, "output", a.output.display())?;
    Ok(0)
}

enum Input {
    Stream(TimeTagStream),
    Histogram(Histogram),
}

fn read_input(path: &Path) -> Result<Input, Error> {
    let text = csvio::read_file(path)?;
    let source = path.display().to_string();
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if header.replace(' ', "") == "channel,time_ps" {
        Ok(Input::Stream(TimeTagStream::parse(&text, &source)?))
    } else {
        Ok(Input::Histogram(Histogram::parse(&text, &source)?))
    }
}

fn cmd_fit_lifetime(a: &FitLifetimeArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let rep_rate = positive("--rep-rate-mhz", a.rep_rate_mhz)? * 1e6;
    let (histogram, period_ps) = match read_input(&a.input)? {
        Input::Stream(s) => {
            let period_ps = s.pulse_period_ps.unwrap_or(1e12 / rep_rate);
            let h = histogram_start_stop(&s, Sync::PulseTrain { period_ps }, a.bin_ps, period_ps.floor() as u64)?;
            if let Some(p) = &a.histogram_out {
                h.write(p)?;
            }
            (h, period_ps)
        }
        Input::Histogram(h) => (h, 1e12 / rep_rate),
    };
    let window = LifetimeWindow {
        start_after_peak_ns: a.start_after_peak_ns,
        end_ns: Some(a.end_ns.unwrap_or(0.8 * period_ps * 1e-3)),
    };
    let fit = fit_lifetime(&histogram, &window)?;
    num(out, "tau_ns", fit.tau_ns)?;
    num(out, "tau_stderr_ns", fit.tau_stderr_ns)?;
    num(out, "amplitude", fit.amplitude)?;
    num(out, "amplitude_stderr", fit.amplitude_stderr)?;
    num(out, "offset", fit.offset)?;
    num(out, "offset_stderr", fit.offset_stderr)?;
    num(out, "chi2_per_dof", fit.chi2_per_dof)?;
    kv(out, "bins_used", fit.bins_used)?;
    Ok(0)
}

fn cmd_fit_g2(a: &FitG2Args, out: &mut dyn Write) -> Result<i32, Error> {
    let histogram = match &a.input {
        None => bundled_g2_histogram(),
        Some(p) => match read_input(p)? {
            Input::Stream(s) => {
                let h = histogram_start_stop(&s, Sync::Channel, a.bin_ps, a.window_ps)?;
                if let Some(p) = &a.histogram_out {
                    h.write(p)?;
                }
                h
            }
            Input::Histogram(h) => h,
        },
    };
    let fit = fit_g2(&histogram, (a.norm_min_ns, a.norm_max_ns))?;
    num(out, "g2_zero", fit.g2_zero)?;
    num(out, "g2_zero_stderr", fit.g2_zero_stderr)?;
    num(out, "a", fit.a)?;
    num(out, "a_stderr", fit.a_stderr)?;
    num(out, "tau1_ns", fit.tau1_ns)?;
    num(out, "tau1_stderr_ns", fit.tau1_stderr_ns)?;
    num(out, "tau2_ns", fit.tau2_ns)?;
    num(out, "tau2_stderr_ns", fit.tau2_stderr_ns)?;
    num(out, "background_fraction", fit.background_fraction)?;
    num(out, "chi2_per_dof", fit.chi2_per_dof)?;
    kv(out, "single_emitter", fit.single_emitter)?;
    Ok(0)
}

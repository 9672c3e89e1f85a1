//! File formats: time series (CSV or raw float64 with a JSON sidecar),
//! tabulated spectra (CSV), filter exports (JSON and CSV) and FIR taps
//! (CSV).
//!
//! All floats are written in shortest round-trip form, so identical data
//! produces byte-identical files.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::BasisConfig;
use crate::error::SfwError;
use crate::precondition::ScalingFunction;
use crate::spectral::{Asymptotics, SpectrumKind, TabulatedSpectrum};
use crate::timeseries::TimeSeries;
use crate::Result;

// ---------------------------------------------------------------------------
// Time series
// ---------------------------------------------------------------------------

/// Write a series as CSV with header `t,value`.
pub fn write_series_csv(path: &Path, ts: &TimeSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "value"])?;
    for (i, v) in ts.samples.iter().enumerate() {
        w.write_record(&[format!("{}", i as f64 * ts.dt), format!("{v}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a `t,value` CSV; the sample period comes from the first two
/// timestamps.
pub fn read_series_csv(path: &Path) -> Result<TimeSeries> {
    let mut r = csv::Reader::from_path(path)?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(SfwError::Format(format!("{}: need t,value rows", path.display())));
        }
        times.push(parse_f64(&rec[0], path)?);
        values.push(parse_f64(&rec[1], path)?);
    }
    if times.len() < 2 {
        return Err(SfwError::Format(format!(
            "{}: need at least two samples",
            path.display()
        )));
    }
    TimeSeries::new(times[1] - times[0], values)
}

#[derive(Serialize, Deserialize)]
struct RawSidecar {
    dt: f64,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Write raw little-endian float64 samples plus a `<file>.json` sidecar
/// holding `{"dt": ...}`.
pub fn write_series_raw(path: &Path, ts: &TimeSeries) -> Result<()> {
    let mut bytes = Vec::with_capacity(ts.samples.len() * 8);
    for v in &ts.samples {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    let mut f = std::fs::File::create(sidecar_path(path))?;
    serde_json::to_writer(&mut f, &RawSidecar { dt: ts.dt })?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Read a raw float64 series written by [`write_series_raw`].
pub fn read_series_raw(path: &Path) -> Result<TimeSeries> {
    let sidecar: RawSidecar =
        serde_json::from_slice(&std::fs::read(sidecar_path(path))?)?;
    let bytes = std::fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(SfwError::Format(format!(
            "{}: length not a multiple of 8",
            path.display()
        )));
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    TimeSeries::new(sidecar.dt, samples)
}

/// Read a series by extension: `.csv` or raw float64 with sidecar.
pub fn read_series(path: &Path) -> Result<TimeSeries> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_series_csv(path),
        _ => read_series_raw(path),
    }
}

// ---------------------------------------------------------------------------
// Tabulated spectra
// ---------------------------------------------------------------------------

/// Write a spectrum as CSV with header `omega_rad_s,re,im`; the `im` column
/// is omitted for auto-spectra.
pub fn write_spectrum_csv(path: &Path, spec: &TabulatedSpectrum) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    match spec.kind {
        SpectrumKind::Auto => {
            w.write_record(["omega_rad_s", "re"])?;
            for (f, v) in spec.frequencies.iter().zip(&spec.values) {
                w.write_record(&[format!("{f}"), format!("{}", v.re)])?;
            }
        }
        SpectrumKind::Cross => {
            w.write_record(["omega_rad_s", "re", "im"])?;
            for (f, v) in spec.frequencies.iter().zip(&spec.values) {
                w.write_record(&[format!("{f}"), format!("{}", v.re), format!("{}", v.im)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a spectrum CSV; two columns make an auto-spectrum, three a
/// cross-spectrum.
pub fn read_spectrum_csv(path: &Path) -> Result<TabulatedSpectrum> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let cross = headers.len() >= 3;
    let mut freqs = Vec::new();
    let mut vals = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        freqs.push(parse_f64(&rec[0], path)?);
        let re = parse_f64(&rec[1], path)?;
        let im = if cross { parse_f64(&rec[2], path)? } else { 0.0 };
        vals.push(Complex64::new(re, im));
    }
    TabulatedSpectrum::new(
        freqs,
        vals,
        if cross { SpectrumKind::Cross } else { SpectrumKind::Auto },
    )
}

// ---------------------------------------------------------------------------
// Filter exports
// ---------------------------------------------------------------------------

/// JSON-serializable form of a designed filter: expansion coefficients plus
/// the reconstruction data (scaling function and basis geometry).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterFile {
    pub coeffs_re: Vec<f64>,
    pub coeffs_im: Vec<f64>,
    pub scaling: ScalingFunction,
    pub basis: BasisConfig,
    /// Declared asymptotics of the data pair, kept for re-validation.
    pub syy_asymptotics: Option<Asymptotics>,
}

impl FilterFile {
    pub fn coeffs(&self) -> Vec<Complex64> {
        self.coeffs_re
            .iter()
            .zip(&self.coeffs_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect()
    }
}

pub fn write_filter_json(path: &Path, file: &FilterFile) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, file)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_filter_json(path: &Path) -> Result<FilterFile> {
    Ok(serde_json::from_slice(&std::fs::read(path)?)?)
}

/// Write frequency-response samples as CSV `omega_rad_s,re,im`.
pub fn write_response_csv(path: &Path, grid: &[f64], response: &[Complex64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["omega_rad_s", "re", "im"])?;
    for (f, v) in grid.iter().zip(response) {
        w.write_record(&[format!("{f}"), format!("{}", v.re), format!("{}", v.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Write FIR taps as CSV `t_s,tap`.
pub fn write_taps_csv(path: &Path, dt: f64, taps: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t_s", "tap"])?;
    for (i, v) in taps.iter().enumerate() {
        w.write_record(&[format!("{}", i as f64 * dt), format!("{v}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Read FIR taps written by [`write_taps_csv`]; returns `(dt, taps)`.
pub fn read_taps_csv(path: &Path) -> Result<(f64, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path)?;
    let mut times = Vec::new();
    let mut taps = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        times.push(parse_f64(&rec[0], path)?);
        taps.push(parse_f64(&rec[1], path)?);
    }
    if times.len() < 2 {
        return Err(SfwError::Format(format!(
            "{}: need at least two taps",
            path.display()
        )));
    }
    Ok((times[1] - times[0], taps))
}

fn parse_f64(s: &str, path: &Path) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| SfwError::Format(format!("{}: {e} in {s:?}", path.display())))
}

//! Subcommand implementations.

use std::path::Path;
use std::process::ExitCode;

use sfw_core::design::{error_psd, log_bin_average, WienerFilter};
use sfw_core::estimation::{fit_asymptotics, floor_nonpositive, welch_csd, welch_psd};
use sfw_core::io;
use sfw_core::simulate::SimSpec;
use sfw_core::spectral::{log_grid, SpectralFunction, SpectrumKind, TabulatedSpectrum};
use sfw_core::timeseries::TimeSeries;
use sfw_core::SfwError;

use crate::config::{
    load_json, DesignConfig, SimulateConfig, SpectrumSource, StreamConfigFile,
};
use crate::manifest::ManifestBuilder;

/// Map errors onto the exit-code contract: 2 usage/IO, 3 validation,
/// 4 numerical.
pub fn exit_code_for(e: &SfwError) -> u8 {
    match e {
        SfwError::Stage { source, .. } => exit_code_for(source),
        SfwError::ValidationFailed(_) => 3,
        SfwError::Io(_)
        | SfwError::Csv(_)
        | SfwError::Json(_)
        | SfwError::Format(_)
        | SfwError::InvalidArgument(_)
        | SfwError::TooShort { .. }
        | SfwError::SeriesMismatch(_)
        | SfwError::RateMismatch { .. }
        | SfwError::InsufficientBand(_) => 2,
        _ => 4,
    }
}

fn ensure_dir(dir: &Path) -> Result<(), SfwError> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

pub fn simulate(config_path: &Path, out: &Path) -> Result<ExitCode, SfwError> {
    let cfg: SimulateConfig = load_json(config_path)?;
    ensure_dir(out)?;
    let mut manifest = ManifestBuilder::new("simulate", serde_json::to_value(&cfg)?);
    manifest.seed(cfg.seed);

    if cfg.duration_s <= 0.0 || cfg.sample_rate_hz <= 0.0 {
        return Err(SfwError::InvalidArgument(
            "duration and sample rate must be positive".into(),
        ));
    }
    let band = cfg.band.unwrap_or((
        2.0 * std::f64::consts::PI / cfg.duration_s,
        std::f64::consts::PI * cfg.sample_rate_hz,
    ));
    let spec = SimSpec {
        duration: cfg.duration_s,
        sample_rate: cfg.sample_rate_hz,
        signal: cfg.signal.build(band)?,
        noise: cfg.noise.build(band)?,
        seed: cfg.seed,
    };
    manifest.stage("setup");
    let (x, n, y) = sfw_core::simulate::synthesize(&spec)?;
    manifest.stage("synthesize");
    for (name, ts) in [("x.csv", &x), ("n.csv", &n), ("y.csv", &y)] {
        let path = out.join(name);
        io::write_series_csv(&path, ts)?;
        manifest.output(&path)?;
    }
    manifest.stage("write");
    manifest.write(out)?;
    Ok(ExitCode::SUCCESS)
}

/// Build a spectrum from a config source. `cross` selects the output kind.
fn resolve_spectrum(
    src: &SpectrumSource,
    band: (f64, f64),
    cross: bool,
) -> Result<SpectralFunction, SfwError> {
    match src {
        SpectrumSource::Model(m) => {
            let s = m.build(band)?;
            Ok(if cross { sfw_core::spectral::as_cross(&s) } else { s })
        }
        SpectrumSource::Table { path, asymptotics } => {
            let mut table = io::read_spectrum_csv(path)?;
            if cross && table.kind == SpectrumKind::Auto {
                table.kind = SpectrumKind::Cross;
            }
            let s = SpectralFunction::from_table(table, asymptotics.build());
            let (lo, hi) = s.support();
            Ok(s.with_support((band.0.max(lo), band.1.min(hi))))
        }
        SpectrumSource::Series {
            path,
            welch,
            asymptotics,
            fit_low,
            fit_high,
        } => {
            if cross {
                return Err(SfwError::InvalidArgument(
                    "a single series yields an auto-spectrum; use series_pair for S_xy".into(),
                ));
            }
            let ts = io::read_series(path)?;
            let mut table = welch_psd(&ts, &welch.to_config()?)?;
            floor_nonpositive(&mut table, 1e-6);
            let asym = match (asymptotics, fit_low, fit_high) {
                (Some(a), _, _) => a.build(),
                (None, Some(lo_band), Some(hi_band)) => {
                    fit_asymptotics(&table, *lo_band, *hi_band)?.asymptotics
                }
                _ => {
                    return Err(SfwError::InvalidArgument(
                        "series source needs either declared asymptotics or fit bands".into(),
                    ))
                }
            };
            let s = SpectralFunction::from_table(table, asym);
            let (lo, hi) = s.support();
            Ok(s.with_support((band.0.max(lo), band.1.min(hi))))
        }
        SpectrumSource::SeriesPair {
            path_x,
            path_y,
            welch,
            asymptotics,
        } => {
            let x = io::read_series(path_x)?;
            let y = io::read_series(path_y)?;
            let table = welch_csd(&x, &y, &welch.to_config()?)?;
            let s = SpectralFunction::from_table(table, asymptotics.build());
            let (lo, hi) = s.support();
            Ok(s.with_support((band.0.max(lo), band.1.min(hi))))
        }
    }
}

fn write_plot_csv(
    path: &Path,
    rows: &[(&str, &[f64], Vec<f64>)],
) -> Result<(), SfwError> {
    let mut w = csv::WriterBuilder::new().from_path(path).map_err(SfwError::Csv)?;
    w.write_record(["series", "omega_rad_s", "value"])
        .map_err(SfwError::Csv)?;
    for (name, grid, values) in rows {
        for (omega, value) in grid.iter().zip(values) {
            w.write_record(&[name.to_string(), format!("{omega}"), format!("{value}")])
                .map_err(SfwError::Csv)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn design(config_path: &Path, out: &Path) -> Result<ExitCode, SfwError> {
    let cfg: DesignConfig = load_json(config_path)?;
    ensure_dir(out)?;
    let mut manifest = ManifestBuilder::new("design", serde_json::to_value(&cfg)?);

    let s_xy = resolve_spectrum(&cfg.s_xy, cfg.band, true)?;
    let s_yy = resolve_spectrum(&cfg.s_yy, cfg.band, false)?;
    manifest.stage("load");

    let opts = cfg.design.to_options();
    let flt = sfw_core::design::design(&s_xy, &s_yy, &opts)?;
    manifest.stage("design");

    let mut file = flt.to_file();
    file.syy_asymptotics = Some(*s_yy.asymptotics());
    let filter_path = out.join("filter.json");
    io::write_filter_json(&filter_path, &file)?;
    manifest.output(&filter_path)?;

    let (lo, hi) = (cfg.band.0, cfg.band.1);
    let grid = log_grid(lo, hi, 1024);
    let response = flt.frequency_response(&grid);
    let response_path = out.join("filter.csv");
    io::write_response_csv(&response_path, &grid, &response)?;
    manifest.output(&response_path)?;

    // Plot-ready magnitude/phase next to the non-causal reference.
    let noncausal = sfw_core::oracle::noncausal_filter(&s_xy, &s_yy, &grid)?;
    let plot_path = out.join("plot.csv");
    write_plot_csv(
        &plot_path,
        &[
            ("mag2", &grid, response.iter().map(|c| c.norm_sqr()).collect()),
            ("phase", &grid, response.iter().map(|c| c.arg()).collect()),
            (
                "noncausal_mag2",
                &grid,
                noncausal.iter().map(|c| c.norm_sqr()).collect(),
            ),
        ],
    )?;
    manifest.output(&plot_path)?;

    if let Some(b) = &flt.budget {
        manifest.budget(serde_json::to_value(b)?);
    }
    if let Some(d) = &flt.diagnostics {
        manifest.diagnostics(serde_json::json!({
            "convergence": d,
            "condition": flt.condition,
            "scaling": flt.scaling,
        }));
    }
    manifest.stage("write");
    manifest.write(out)?;
    Ok(ExitCode::SUCCESS)
}

fn error_products(
    out: &Path,
    manifest: &mut ManifestBuilder,
    truth: &TimeSeries,
    estimate: &TimeSeries,
    measurement: &TimeSeries,
) -> Result<(), SfwError> {
    let seg = (truth.len() / 8).next_power_of_two().clamp(64, 4096);
    let cfg = sfw_core::estimation::WelchConfig::default_for(seg)?;
    let see = error_psd(truth, estimate, &cfg)?;
    let see_path = out.join("error_psd.csv");
    io::write_spectrum_csv(&see_path, &see)?;
    manifest.output(&see_path)?;

    // Relative error spectrum S_εε/S_yy on ~250 log bins, 10σ outliers
    // dropped.
    let syy = welch_psd(measurement, &cfg)?;
    let ratio_raw = TabulatedSpectrum::auto(
        see.frequencies.clone(),
        see.values
            .iter()
            .zip(&syy.values)
            .map(|(e, y)| (e.re / y.re).max(1e-300))
            .collect(),
    )?;
    let binned = log_bin_average(&ratio_raw, 250, 10.0)?;
    let rel_path = out.join("error_rel.csv");
    io::write_spectrum_csv(&rel_path, &binned)?;
    manifest.output(&rel_path)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn apply(
    filter_path: &Path,
    input_path: &Path,
    mode: &str,
    truth: Option<&Path>,
    stream_config: Option<&Path>,
    taps: usize,
    out: &Path,
) -> Result<ExitCode, SfwError> {
    ensure_dir(out)?;
    let y = io::read_series(input_path)?;
    match mode {
        "recorded" => {
            let file = io::read_filter_json(filter_path)?;
            let mut manifest = ManifestBuilder::new(
                "apply --mode recorded",
                serde_json::json!({
                    "filter": filter_path.display().to_string(),
                    "input": input_path.display().to_string(),
                    "taps": taps,
                }),
            );
            let flt = WienerFilter::from_file(&file);
            let fir = flt.to_fir(y.sample_rate(), taps, Some(1 << 18))?;
            manifest.stage("realize");
            let x_hat = fir.apply(&y)?;
            manifest.stage("filter");
            let taps_path = out.join("fir_taps.csv");
            io::write_taps_csv(&taps_path, fir.dt, &fir.taps)?;
            manifest.output(&taps_path)?;
            let xhat_path = out.join("x_hat.csv");
            io::write_series_csv(&xhat_path, &x_hat)?;
            manifest.output(&xhat_path)?;
            if let Some(tp) = truth {
                let x = io::read_series(tp)?;
                error_products(out, &mut manifest, &x, &x_hat, &y)?;
            }
            manifest.diagnostics(serde_json::json!({ "fir_leakage": fir.leakage }));
            manifest.stage("write");
            manifest.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        "stream" => {
            let cfg_path = stream_config.ok_or_else(|| {
                SfwError::InvalidArgument("--mode stream requires --config".into())
            })?;
            let cfg: StreamConfigFile = load_json(cfg_path)?;
            let mut manifest = ManifestBuilder::new(
                "apply --mode stream",
                serde_json::to_value(&cfg)?,
            );
            let s_xy = resolve_spectrum(&cfg.s_xy, cfg.band, true)?;
            let stream_cfg = sfw_core::streaming::StreamConfig {
                sample_rate: y.sample_rate(),
                block_len: cfg.stream.block_len,
                smoothing: cfg.stream.smoothing,
                redesign_every: cfg.stream.redesign_every,
                s_xy,
                syy_asymptotics: cfg.syy_asymptotics.build(),
                design: cfg.design.to_options(),
                n_taps: cfg.stream.n_taps,
                fir_grid: cfg.stream.fir_grid,
            };
            let mut sf = sfw_core::streaming::StreamingFilter::new(stream_cfg)?;
            let block = cfg.stream.block_len;
            let mut out_samples = Vec::with_capacity(y.len());
            let mut pos = 0;
            while pos + block <= y.len() {
                let estimates = sf.process_block(&y.samples[pos..pos + block])?;
                out_samples.extend_from_slice(&estimates);
                pos += block;
            }
            manifest.stage("stream");
            let x_hat = TimeSeries::new(y.dt, out_samples)?;
            let xhat_path = out.join("x_hat.csv");
            io::write_series_csv(&xhat_path, &x_hat)?;
            manifest.output(&xhat_path)?;
            if let Some(tp) = truth {
                let x_full = io::read_series(tp)?;
                let x = TimeSeries::new(x_full.dt, x_full.samples[..x_hat.len()].to_vec())?;
                let y_clip = TimeSeries::new(y.dt, y.samples[..x_hat.len()].to_vec())?;
                error_products(out, &mut manifest, &x, &x_hat, &y_clip)?;
            }
            manifest.diagnostics(serde_json::json!({
                "redesigns": sf.redesign_count(),
                "failures": sf.failures(),
            }));
            manifest.stage("write");
            manifest.write(out)?;
            Ok(ExitCode::SUCCESS)
        }
        other => Err(SfwError::InvalidArgument(format!(
            "unknown mode {other:?} (recorded|stream)"
        ))),
    }
}

pub fn verify(suite: &str, out: &Path) -> Result<ExitCode, SfwError> {
    ensure_dir(out)?;
    let results = sfw_core::checks::run_suite(suite)?;
    let mut all_pass = true;
    for r in &results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {name}: metric {metric:.3e} vs threshold {threshold:.3e}",
            name = r.name,
            metric = r.metric,
            threshold = r.threshold
        );
        all_pass &= r.pass;
    }
    let report_path = out.join("verify.json");
    let mut bytes = serde_json::to_vec_pretty(&results)?;
    bytes.push(b'\n');
    std::fs::write(&report_path, bytes)?;
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(4))
    }
}

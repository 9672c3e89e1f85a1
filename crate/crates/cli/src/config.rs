//! JSON configuration schemas for the CLI.

use serde::{Deserialize, Serialize};

use sfw_core::spectral::{
    lorentzian_peak, one_pole, powerlaw_plus_white, white, Asymptotics, PowerLaw,
    SpectralFunction,
};
use sfw_core::SfwError;

/// Analytic spectrum models addressable from configuration files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `A γ² / ((|ω|-ω_c)² + γ²)`.
    LorentzianPeak { a: f64, gamma: f64, omega_c: f64 },
    /// `amplitude/|ω|^exponent + floor`.
    PowerlawPlusWhite {
        amplitude: f64,
        exponent: f64,
        floor: f64,
    },
    /// Flat spectrum.
    White { level: f64 },
    /// `2a/(ω² + a²)`.
    OnePole { a: f64 },
    /// Pointwise sum of sub-models.
    Sum { terms: Vec<ModelSpec> },
}

impl ModelSpec {
    pub fn build(&self, support: (f64, f64)) -> Result<SpectralFunction, SfwError> {
        Ok(match self {
            ModelSpec::LorentzianPeak { a, gamma, omega_c } => {
                lorentzian_peak(*a, *gamma, *omega_c, support)
            }
            ModelSpec::PowerlawPlusWhite {
                amplitude,
                exponent,
                floor,
            } => powerlaw_plus_white(*amplitude, *exponent, *floor, support),
            ModelSpec::White { level } => white(*level, support),
            ModelSpec::OnePole { a } => one_pole(*a, support),
            ModelSpec::Sum { terms } => {
                if terms.is_empty() {
                    return Err(SfwError::InvalidArgument("sum model needs terms".into()));
                }
                let mut acc = terms[0].build(support)?;
                for t in &terms[1..] {
                    acc = SpectralFunction::add(&acc, &t.build(support)?);
                }
                acc
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
    pub signal: ModelSpec,
    pub noise: ModelSpec,
    /// Trusted band; defaults to `[2π/duration, π·rate]`.
    pub band: Option<(f64, f64)>,
}

/// Serializable subset of the design options (scaling and truncation
/// choices).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DesignParams {
    pub n_modes: Option<usize>,
    pub omega0: Option<f64>,
    #[serde(default)]
    pub phase_rad: f64,
    /// Defaults to true.
    pub precondition: Option<bool>,
    pub quad_points: Option<usize>,
    pub lead_time_s: Option<f64>,
}

impl DesignParams {
    pub fn to_options(&self) -> sfw_core::design::DesignOptions {
        sfw_core::design::DesignOptions {
            n_modes: self.n_modes,
            omega_0: self.omega0,
            phase_rad: self.phase_rad,
            precondition: self.precondition.unwrap_or(true),
            quad_points: self.quad_points,
            lead_time: self.lead_time_s,
            ..sfw_core::design::DesignOptions::default()
        }
    }
}

/// Declared power-law tails in configuration form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticsSpec {
    /// `(exponent, amplitude)` at ω → 0.
    pub at_zero: (f64, f64),
    /// `(exponent, amplitude)` at ω → ∞.
    pub at_infinity: (f64, f64),
}

impl AsymptoticsSpec {
    pub fn build(&self) -> Asymptotics {
        Asymptotics::new(
            PowerLaw::new(self.at_zero.0, self.at_zero.1),
            PowerLaw::new(self.at_infinity.0, self.at_infinity.1),
        )
    }
}

/// Welch parameters in configuration form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WelchParams {
    pub segment_length: usize,
    #[serde(default = "default_overlap")]
    pub overlap_fraction: f64,
    /// "hann" or "slepian" (time-bandwidth 3 unless `slepian_nw` is given).
    #[serde(default = "default_window")]
    pub window: String,
    pub slepian_nw: Option<f64>,
}

fn default_overlap() -> f64 {
    0.85
}
fn default_window() -> String {
    "hann".into()
}

impl WelchParams {
    pub fn to_config(&self) -> Result<sfw_core::estimation::WelchConfig, SfwError> {
        let window = match self.window.as_str() {
            "hann" => sfw_core::estimation::WindowKind::Hann,
            "slepian" => sfw_core::estimation::WindowKind::Slepian {
                nw: self.slepian_nw.unwrap_or(3.0),
            },
            other => {
                return Err(SfwError::InvalidArgument(format!(
                    "unknown window {other:?} (hann|slepian)"
                )))
            }
        };
        sfw_core::estimation::WelchConfig::new(self.segment_length, self.overlap_fraction, window)
    }
}

/// Where the observation spectrum comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    /// Analytic model.
    Model(ModelSpec),
    /// Tabulated CSV (`omega_rad_s,re[,im]`) with declared tails.
    Table {
        path: std::path::PathBuf,
        asymptotics: AsymptoticsSpec,
    },
    /// Welch-estimated from a recorded series.
    Series {
        path: std::path::PathBuf,
        welch: WelchParams,
        /// Declared tails; if absent they are fitted on `fit_low`/`fit_high`.
        asymptotics: Option<AsymptoticsSpec>,
        fit_low: Option<(f64, f64)>,
        fit_high: Option<(f64, f64)>,
    },
    /// Welch cross-spectrum of a recorded pair (for measured `S_xy`).
    SeriesPair {
        path_x: std::path::PathBuf,
        path_y: std::path::PathBuf,
        welch: WelchParams,
        asymptotics: AsymptoticsSpec,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignConfig {
    /// Trusted band `[ω_m, ω_M]` in rad/s.
    pub band: (f64, f64),
    pub s_xy: SpectrumSource,
    pub s_yy: SpectrumSource,
    #[serde(default)]
    pub design: DesignParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamParams {
    pub block_len: usize,
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
    #[serde(default = "default_cadence")]
    pub redesign_every: usize,
    #[serde(default = "default_taps")]
    pub n_taps: usize,
    #[serde(default = "default_fir_grid")]
    pub fir_grid: usize,
}

fn default_smoothing() -> f64 {
    0.9
}
fn default_cadence() -> usize {
    8
}
fn default_taps() -> usize {
    2048
}
fn default_fir_grid() -> usize {
    1 << 16
}

/// Configuration for `apply --mode stream`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamConfigFile {
    pub band: (f64, f64),
    pub s_xy: SpectrumSource,
    /// Declared tails for the on-line estimated observation spectrum.
    pub syy_asymptotics: AsymptoticsSpec,
    #[serde(default)]
    pub design: DesignParams,
    pub stream: StreamParams,
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, SfwError> {
    Ok(serde_json::from_slice(&std::fs::read(path)?)?)
}

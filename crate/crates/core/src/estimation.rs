//! Spectral estimation from time series: Welch auto- and cross-spectra,
//! Slepian (DPSS) and Hann tapers, and power-law asymptotics fitting.
//!
//! Densities are two-sided in rad/s, normalized so that the integral of the
//! estimate over the sampling band recovers the sample variance. The DC bin
//! is excluded from the trusted grid.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::SfwError;
use crate::par;
use crate::spectral::{Asymptotics, PowerLaw, TabulatedSpectrum};
use crate::timeseries::TimeSeries;
use crate::Result;

/// Taper applied to each segment.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum WindowKind {
    Hann,
    /// First discrete prolate spheroidal sequence with time-bandwidth
    /// product `nw`.
    Slepian { nw: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Detrend {
    None,
    Mean,
}

/// Welch estimator configuration.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct WelchConfig {
    pub segment_length: usize,
    /// In `[0, 1)`; 0.85 sits in the middle of the usual 80-90% range.
    pub overlap_fraction: f64,
    pub window: WindowKind,
    pub detrend: Detrend,
}

impl WelchConfig {
    pub fn new(segment_length: usize, overlap_fraction: f64, window: WindowKind) -> Result<Self> {
        if segment_length < 16 {
            return Err(SfwError::InvalidArgument(
                "segment_length must be at least 16".into(),
            ));
        }
        if !(0.0..1.0).contains(&overlap_fraction) {
            return Err(SfwError::InvalidArgument(
                "overlap_fraction must be in [0, 1)".into(),
            ));
        }
        Ok(Self {
            segment_length,
            overlap_fraction,
            window,
            detrend: Detrend::Mean,
        })
    }

    pub fn default_for(segment_length: usize) -> Result<Self> {
        Self::new(segment_length, 0.85, WindowKind::Hann)
    }

    fn step(&self) -> usize {
        let ov = (self.segment_length as f64 * self.overlap_fraction) as usize;
        (self.segment_length - ov).max(1)
    }
}

/// Segment length that puts about eight Fourier bins across a target
/// linewidth: `Δω_bin = 2π/(P dt) ≈ linewidth/8`.
pub fn segment_length_for_linewidth(linewidth_rad: f64, dt: f64) -> usize {
    let p = 16.0 * std::f64::consts::PI / (linewidth_rad * dt);
    (p as usize).next_power_of_two().max(16)
}

pub fn hann_window(n: usize) -> Vec<f64> {
    let nm1 = (n - 1) as f64;
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / nm1).cos())
        .collect()
}

/// First DPSS taper via the tridiagonal eigenproblem: Sturm bisection for
/// the top eigenvalue, then inverse iteration for its vector. Normalized to
/// unit energy, positive at the center.
pub fn dpss_window(n: usize, nw: f64) -> Vec<f64> {
    let w = nw / n as f64;
    let cos2pw = (2.0 * std::f64::consts::PI * w).cos();
    let diag: Vec<f64> = (0..n)
        .map(|j| (0.5 * (n as f64 - 1.0 - 2.0 * j as f64)).powi(2) * cos2pw)
        .collect();
    // off[j] couples j-1 and j.
    let off: Vec<f64> = (1..n).map(|j| 0.5 * j as f64 * (n - j) as f64).collect();

    // Number of eigenvalues strictly below lam.
    let count_below = |lam: f64| -> usize {
        let mut count = 0;
        let mut q = diag[0] - lam;
        if q < 0.0 {
            count += 1;
        }
        for j in 1..n {
            let e2 = off[j - 1] * off[j - 1];
            q = diag[j] - lam - e2 / if q == 0.0 { 1e-300 } else { q };
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };

    let mut hi = (0..n)
        .map(|j| {
            diag[j]
                + if j > 0 { off[j - 1].abs() } else { 0.0 }
                + if j + 1 < n { off[j].abs() } else { 0.0 }
        })
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    let mut lo = -hi;
    // Bisect until [lo, hi] brackets only the largest eigenvalue tightly.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 * hi.abs().max(1.0) {
            break;
        }
    }
    let lambda = lo;

    // Inverse iteration with the Thomas algorithm on T - λI (slightly
    // shifted to stay factorable).
    let shift = lambda + 1e-8 * lambda.abs().max(1.0);
    let mut v: Vec<f64> = (0..n)
        .map(|j| {
            let x = (j as f64 - 0.5 * (n as f64 - 1.0)) / n as f64;
            (-8.0 * x * x).exp()
        })
        .collect();
    for _ in 0..4 {
        v = tridiag_solve(&diag, &off, shift, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    if v[n / 2] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    v
}

/// Solve `(T - shift I) x = b` for symmetric tridiagonal `T`.
fn tridiag_solve(diag: &[f64], off: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0] - shift;
    if denom == 0.0 {
        denom = 1e-300;
    }
    c[0] = if n > 1 { off[0] / denom } else { 0.0 };
    d[0] = b[0] / denom;
    for j in 1..n {
        let e = off[j - 1];
        let mut m = diag[j] - shift - e * c[j - 1];
        if m == 0.0 {
            m = 1e-300;
        }
        if j + 1 < n {
            c[j] = off[j] / m;
        }
        d[j] = (b[j] - e * d[j - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for j in (0..n - 1).rev() {
        x[j] = d[j] - c[j] * x[j + 1];
    }
    x
}

fn window_for(cfg: &WelchConfig) -> Vec<f64> {
    match cfg.window {
        WindowKind::Hann => hann_window(cfg.segment_length),
        WindowKind::Slepian { nw } => dpss_window(cfg.segment_length, nw),
    }
}

fn segment_ffts(y: &TimeSeries, cfg: &WelchConfig, window: &[f64]) -> Vec<Vec<Complex64>> {
    let p = cfg.segment_length;
    let step = cfg.step();
    let count = (y.len() - p) / step + 1;
    par::map_indexed(count, |seg| {
        let start = seg * step;
        let chunk = &y.samples[start..start + p];
        let mean = match cfg.detrend {
            Detrend::Mean => chunk.iter().sum::<f64>() / p as f64,
            Detrend::None => 0.0,
        };
        let mut buf: Vec<Complex64> = chunk
            .iter()
            .zip(window)
            .map(|(&v, &w)| Complex64::new((v - mean) * w, 0.0))
            .collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(p).process(&mut buf);
        buf
    })
}

fn check_length(y: &TimeSeries, cfg: &WelchConfig) -> Result<()> {
    if y.len() < 2 * cfg.segment_length {
        return Err(SfwError::TooShort {
            need: 2 * cfg.segment_length,
            got: y.len(),
        });
    }
    Ok(())
}

/// Welch auto-spectrum: averaged windowed periodograms, two-sided density in
/// rad/s, DC excluded.
pub fn welch_psd(y: &TimeSeries, cfg: &WelchConfig) -> Result<TabulatedSpectrum> {
    check_length(y, cfg)?;
    let p = cfg.segment_length;
    let window = window_for(cfg);
    let w2: f64 = window.iter().map(|w| w * w).sum();
    let ffts = segment_ffts(y, cfg, &window);
    let scale = y.dt / (w2 * ffts.len() as f64);
    let mut psd = vec![0.0; p / 2];
    for fft in &ffts {
        for (k, slot) in psd.iter_mut().enumerate() {
            *slot += fft[k + 1].norm_sqr() * scale;
        }
    }
    let freqs: Vec<f64> = (1..=p / 2)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / (p as f64 * y.dt))
        .collect();
    TabulatedSpectrum::auto_unchecked(freqs, psd)
}

/// Welch cross-spectrum of `(x, y)`: averaged cross-periodograms with the
/// same normalization as [`welch_psd`]; conjugate symmetry holds by
/// construction (only positive bins are stored).
pub fn welch_csd(x: &TimeSeries, y: &TimeSeries, cfg: &WelchConfig) -> Result<TabulatedSpectrum> {
    if (x.dt - y.dt).abs() > 1e-12 * x.dt || x.len() != y.len() {
        return Err(SfwError::SeriesMismatch(
            "cross-spectrum needs equal lengths and sample rates".into(),
        ));
    }
    check_length(x, cfg)?;
    let p = cfg.segment_length;
    let window = window_for(cfg);
    let w2: f64 = window.iter().map(|w| w * w).sum();
    let fx = segment_ffts(x, cfg, &window);
    let fy = segment_ffts(y, cfg, &window);
    let scale = x.dt / (w2 * fx.len() as f64);
    let mut csd = vec![Complex64::new(0.0, 0.0); p / 2];
    for (sx, sy) in fx.iter().zip(&fy) {
        for (k, slot) in csd.iter_mut().enumerate() {
            *slot += sx[k + 1].conj() * sy[k + 1] * scale;
        }
    }
    let freqs: Vec<f64> = (1..=p / 2)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / (p as f64 * x.dt))
        .collect();
    TabulatedSpectrum::new(freqs, csd, crate::spectral::SpectrumKind::Cross)
}

/// Floor non-positive bins (possible after averaging) to `epsilon` times the
/// local median over a 33-bin neighborhood. Strict positivity is required
/// downstream.
pub fn floor_nonpositive(spec: &mut TabulatedSpectrum, epsilon: f64) {
    let n = spec.values.len();
    for i in 0..n {
        if spec.values[i].re <= 0.0 {
            let lo = i.saturating_sub(16);
            let hi = (i + 16).min(n - 1);
            let mut window: Vec<f64> = spec.values[lo..=hi]
                .iter()
                .map(|v| v.re)
                .filter(|v| *v > 0.0)
                .collect();
            window.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = window.get(window.len() / 2).copied().unwrap_or(1e-300);
            spec.values[i] = Complex64::new(epsilon * median, 0.0);
        }
    }
}

/// Log-log least squares over `[lo, hi]`: returns `(exponent, amplitude)`
/// for `S ≈ amplitude/ω^exponent`, with the standard error of the slope.
fn fit_powerlaw(spec: &TabulatedSpectrum, lo: f64, hi: f64) -> Result<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = spec
        .frequencies
        .iter()
        .zip(&spec.values)
        .filter(|(f, v)| **f >= lo && **f <= hi && v.norm() > 0.0)
        .map(|(f, v)| (f.ln(), v.norm().ln()))
        .collect();
    if pts.len() < 4 || hi / lo < 10.0 {
        return Err(SfwError::InsufficientBand(format!(
            "need at least a decade with 4 bins in [{lo}, {hi}]"
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let resid2: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let se = (resid2 / (n - 2.0) / (sxx - sx * sx / n)).sqrt();
    Ok((-slope, intercept.exp(), se))
}

/// Fitted power laws over the two ends of a tabulated spectrum.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AsymptoticsFit {
    pub asymptotics: Asymptotics,
    pub slope_se_zero: f64,
    pub slope_se_infinity: f64,
}

/// Fit `S ≈ B/ω^β` on `low_band` and `S ≈ A/ω^α` on `high_band`, each at
/// least one decade wide.
pub fn fit_asymptotics(
    spec: &TabulatedSpectrum,
    low_band: (f64, f64),
    high_band: (f64, f64),
) -> Result<AsymptoticsFit> {
    let (beta, b_amp, se0) = fit_powerlaw(spec, low_band.0, low_band.1)?;
    let (alpha, a_amp, se1) = fit_powerlaw(spec, high_band.0, high_band.1)?;
    Ok(AsymptoticsFit {
        asymptotics: Asymptotics::new(PowerLaw::new(beta, b_amp), PowerLaw::new(alpha, a_amp)),
        slope_se_zero: se0,
        slope_se_infinity: se1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectrumKind;
    use approx::assert_abs_diff_eq;

    const PI: f64 = std::f64::consts::PI;

    fn integrate_two_sided(spec: &TabulatedSpectrum) -> f64 {
        // ∫S dω/2π over ℝ using evenness: (1/π)∫₀^∞.
        let mut acc = 0.0;
        for i in 1..spec.frequencies.len() {
            acc += 0.5
                * (spec.values[i].re + spec.values[i - 1].re)
                * (spec.frequencies[i] - spec.frequencies[i - 1]);
        }
        // Include the strip from 0 to the first bin.
        acc += spec.values[0].re * spec.frequencies[0];
        acc / PI
    }

    fn sine_series(amp: f64, freq_hz: f64, rate: f64, n: usize) -> TimeSeries {
        let dt = 1.0 / rate;
        TimeSeries::new(
            dt,
            (0..n)
                .map(|i| amp * (2.0 * PI * freq_hz * i as f64 * dt).sin())
                .collect(),
        )
        .unwrap()
    }

    fn white_series(rate: f64, n: usize, seed: u64) -> TimeSeries {
        use rand::SeedableRng;
        use rand_distr::Distribution;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let normal = rand_distr::StandardNormal;
        TimeSeries::new(
            1.0 / rate,
            (0..n).map(|_| normal.sample(&mut rng)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn welch_parseval_white_noise() {
        // Unit-variance white noise: integrated PSD ≈ variance within 5%.
        let y = white_series(8.0, 1 << 15, 3);
        let cfg = WelchConfig::default_for(256).unwrap();
        let psd = welch_psd(&y, &cfg).unwrap();
        let integral = integrate_two_sided(&psd);
        let var = y.variance();
        assert!(
            (integral / var - 1.0).abs() < 0.05,
            "integral {integral} vs variance {var}"
        );
        // Positivity before any flooring.
        assert!(psd.values.iter().all(|v| v.re > 0.0));
    }

    #[test]
    fn welch_sine_line_power() {
        // A pure tone of amplitude a carries power a²/2.
        let a = 0.7;
        let y = sine_series(a, 1.0, 64.0, 1 << 14);
        let cfg = WelchConfig::default_for(1024).unwrap();
        let psd = welch_psd(&y, &cfg).unwrap();
        let integral = integrate_two_sided(&psd);
        assert!(
            (integral / (a * a / 2.0) - 1.0).abs() < 0.05,
            "integrated line power {integral}"
        );
    }

    #[test]
    fn welch_slepian_window_variant() {
        let y = white_series(4.0, 1 << 14, 9);
        let cfg = WelchConfig::new(256, 0.85, WindowKind::Slepian { nw: 3.0 }).unwrap();
        let psd = welch_psd(&y, &cfg).unwrap();
        let integral = integrate_two_sided(&psd);
        assert!((integral / y.variance() - 1.0).abs() < 0.05);
    }

    #[test]
    fn dpss_taper_shape() {
        let n = 512;
        let w = dpss_window(n, 3.0);
        // Unit energy, symmetric, positive center, concentrated in band.
        let energy: f64 = w.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(energy, 1.0, epsilon = 1e-10);
        for j in 0..n / 2 {
            assert_abs_diff_eq!(w[j], w[n - 1 - j], epsilon = 1e-8);
        }
        assert!(w[n / 2] > 0.0);
        // In-band energy concentration of the first DPSS is essentially 1.
        let m = 1 << 14;
        let mut buf: Vec<Complex64> = w.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        buf.resize(m, Complex64::new(0.0, 0.0));
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(m).process(&mut buf);
        let band = 3.0 / n as f64; // W = nw/n cycles per sample
        let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
        let inband: f64 = buf
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let f = *k as f64 / m as f64;
                let f = if f > 0.5 { 1.0 - f } else { f };
                f <= band
            })
            .map(|(_, c)| c.norm_sqr())
            .sum();
        assert!(inband / total > 0.999, "concentration {}", inband / total);
    }

    #[test]
    fn csd_of_identical_series_is_psd() {
        let y = white_series(4.0, 1 << 13, 21);
        let cfg = WelchConfig::default_for(256).unwrap();
        let psd = welch_psd(&y, &cfg).unwrap();
        let csd = welch_csd(&y, &y, &cfg).unwrap();
        assert_eq!(csd.kind, SpectrumKind::Cross);
        for (a, b) in psd.values.iter().zip(&csd.values) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12 * a.re.abs().max(1.0));
            assert_abs_diff_eq!(b.im, 0.0, epsilon = 1e-12 * a.re.abs().max(1.0));
        }
    }

    #[test]
    fn csd_of_independent_series_is_small() {
        let x = white_series(4.0, 1 << 15, 100);
        let y = white_series(4.0, 1 << 15, 200);
        let cfg = WelchConfig::default_for(256).unwrap();
        let csd = welch_csd(&x, &y, &cfg).unwrap();
        let psd = welch_psd(&x, &cfg).unwrap();
        let ratio = csd.values.iter().map(|v| v.norm()).sum::<f64>()
            / psd.values.iter().map(|v| v.re).sum::<f64>();
        assert!(ratio < 0.2, "independent CSD should average down, got {ratio}");
    }

    #[test]
    fn csd_recovers_common_component() {
        // y = x + independent noise → CSD ≈ PSD of x.
        let x = white_series(4.0, 1 << 15, 7);
        let n = white_series(4.0, 1 << 15, 8);
        let y = TimeSeries::new(
            x.dt,
            x.samples.iter().zip(&n.samples).map(|(a, b)| a + 0.5 * b).collect(),
        )
        .unwrap();
        let cfg = WelchConfig::default_for(512).unwrap();
        let csd = welch_csd(&x, &y, &cfg).unwrap();
        let sum_csd: f64 = csd.values.iter().map(|v| v.re).sum();
        let psd_x = welch_psd(&x, &cfg).unwrap();
        let sum_psd: f64 = psd_x.values.iter().map(|v| v.re).sum();
        assert!((sum_csd / sum_psd - 1.0).abs() < 0.1);
    }

    #[test]
    fn csd_checks_compatibility() {
        let x = white_series(4.0, 4096, 1);
        let y = white_series(2.0, 4096, 2);
        let cfg = WelchConfig::default_for(256).unwrap();
        assert!(welch_csd(&x, &y, &cfg).is_err());
    }

    #[test]
    fn welch_length_guard() {
        let y = white_series(4.0, 100, 1);
        let cfg = WelchConfig::default_for(256).unwrap();
        assert!(matches!(welch_psd(&y, &cfg), Err(SfwError::TooShort { .. })));
    }

    #[test]
    fn fit_exact_powerlaw() {
        let freqs = crate::spectral::log_grid(1e-2, 1e3, 256);
        let vals: Vec<f64> = freqs.iter().map(|w| 5.0 * w.powf(-1.8)).collect();
        let spec = TabulatedSpectrum::auto(freqs, vals).unwrap();
        let fit = fit_asymptotics(&spec, (1e-2, 1e-1), (1e2, 1e3)).unwrap();
        assert_abs_diff_eq!(fit.asymptotics.at_zero.exponent, 1.8, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.asymptotics.at_zero.amplitude, 5.0, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.asymptotics.at_infinity.exponent, 1.8, epsilon = 1e-6);
    }

    #[test]
    fn fit_white_spectrum_slopes_zero() {
        let freqs = crate::spectral::log_grid(1e-2, 1e3, 256);
        let vals = vec![2.0; 256];
        let spec = TabulatedSpectrum::auto(freqs, vals).unwrap();
        let fit = fit_asymptotics(&spec, (1e-2, 1e-1), (1e2, 1e3)).unwrap();
        assert_abs_diff_eq!(fit.asymptotics.at_zero.exponent, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.asymptotics.at_infinity.exponent, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn fit_model_noise_recovers_both_ends() {
        // 5/ω^1.8 + 0.01: β ≈ 1.8 below the crossover, α ≈ 0 above it.
        let freqs = crate::spectral::log_grid(1e-3, 1e4, 512);
        let vals: Vec<f64> = freqs.iter().map(|w| 5.0 * w.powf(-1.8) + 0.01).collect();
        let spec = TabulatedSpectrum::auto(freqs, vals).unwrap();
        let fit = fit_asymptotics(&spec, (1e-3, 1e-2), (1e3, 1e4)).unwrap();
        assert!((fit.asymptotics.at_zero.exponent - 1.8).abs() < 0.01);
        assert!((fit.asymptotics.at_zero.amplitude - 5.0).abs() / 5.0 < 0.01);
        assert!(fit.asymptotics.at_infinity.exponent.abs() < 0.01);
        assert!((fit.asymptotics.at_infinity.amplitude - 0.01).abs() / 0.01 < 0.02);
    }

    #[test]
    fn fit_requires_a_decade() {
        let freqs = crate::spectral::log_grid(1.0, 2.0, 32);
        let vals = vec![1.0; 32];
        let spec = TabulatedSpectrum::auto(freqs, vals).unwrap();
        assert!(matches!(
            fit_asymptotics(&spec, (1.0, 2.0), (1.0, 2.0)),
            Err(SfwError::InsufficientBand(_))
        ));
    }

    #[test]
    fn flooring_lifts_nonpositive_bins() {
        let freqs = crate::spectral::log_grid(1.0, 100.0, 32);
        let mut vals: Vec<Complex64> =
            freqs.iter().map(|_| Complex64::new(1.0, 0.0)).collect();
        vals[10] = Complex64::new(-0.5, 0.0);
        let mut spec = TabulatedSpectrum::new(freqs, vals, SpectrumKind::Cross).unwrap();
        floor_nonpositive(&mut spec, 1e-6);
        assert!(spec.values.iter().all(|v| v.re > 0.0));
        assert_abs_diff_eq!(spec.values[10].re, 1e-6, epsilon = 1e-12);
    }
}

//! Spectral data: evaluable auto- and cross-spectra with declared power-law
//! asymptotics, analytic model constructors, tabulated (estimated) spectra,
//! feasibility validation, and the error-spectrum/variance objective.
//!
//! Conventions. Spectra are two-sided densities in angular frequency, so a
//! process variance is `∫ S(ω) dω / 2π` over the real line. Auto-spectra are
//! real, even and strictly positive on their trusted band; cross-spectra
//! satisfy `S(-ω) = S(ω)*` for real underlying processes. A filter `H(t)`
//! enters through its transform `h(ω) = ∫ H(t) e^{iωt} dt`, so causal filters
//! are analytic in the upper half plane.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::SfwError;
use crate::par;
use crate::Result;

/// One power-law branch `S(ω) ≈ amplitude / |ω|^exponent`.
///
/// `exponent > 0` means divergence toward the branch point (growth at 0,
/// decay at infinity depending on which end it describes).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub amplitude: f64,
}

impl PowerLaw {
    pub fn new(exponent: f64, amplitude: f64) -> Self {
        Self { exponent, amplitude }
    }

    pub fn eval(&self, omega: f64) -> f64 {
        self.amplitude * omega.abs().powf(-self.exponent)
    }

    /// Dominant branch of a sum near ω = 0: the faster-growing term wins.
    fn dominant_at_zero(a: PowerLaw, b: PowerLaw) -> PowerLaw {
        if (a.exponent - b.exponent).abs() < 1e-12 {
            PowerLaw::new(a.exponent, a.amplitude + b.amplitude)
        } else if a.exponent > b.exponent {
            a
        } else {
            b
        }
    }

    /// Dominant branch of a sum near ω = ∞: the slower-decaying term wins.
    fn dominant_at_infinity(a: PowerLaw, b: PowerLaw) -> PowerLaw {
        if (a.exponent - b.exponent).abs() < 1e-12 {
            PowerLaw::new(a.exponent, a.amplitude + b.amplitude)
        } else if a.exponent < b.exponent {
            a
        } else {
            b
        }
    }
}

/// Declared behavior of a spectrum at both ends of the frequency axis.
///
/// For auto-spectra the amplitudes are the actual asymptotic prefactors; for
/// cross-spectra they are envelope bounds on the magnitude.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Asymptotics {
    pub at_zero: PowerLaw,
    pub at_infinity: PowerLaw,
}

impl Asymptotics {
    pub fn new(at_zero: PowerLaw, at_infinity: PowerLaw) -> Self {
        Self { at_zero, at_infinity }
    }
}

/// Whether a spectrum is an auto-spectrum (real, even, positive) or a
/// cross-spectrum (complex, conjugate-symmetric).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SpectrumKind {
    Auto,
    Cross,
}

/// Samples of a spectrum on a strictly increasing positive frequency grid.
///
/// Interpolation follows the shape of the data: log-log for auto-spectra
/// (power laws become straight lines) and log-frequency linear on real and
/// imaginary parts for cross-spectra (avoids phase-wrap artifacts). Outside
/// the grid the declared asymptotic power law continues the curve, matched in
/// value at the boundary sample.
#[derive(Debug, Clone)]
pub struct TabulatedSpectrum {
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
    pub kind: SpectrumKind,
}

impl TabulatedSpectrum {
    pub fn new(frequencies: Vec<f64>, values: Vec<Complex64>, kind: SpectrumKind) -> Result<Self> {
        if frequencies.len() != values.len() || frequencies.len() < 2 {
            return Err(SfwError::InvalidArgument(
                "tabulated spectrum needs matching grids with at least 2 points".into(),
            ));
        }
        if frequencies[0] <= 0.0 {
            return Err(SfwError::InvalidArgument(
                "tabulated frequencies must be positive".into(),
            ));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SfwError::InvalidArgument(
                "tabulated frequencies must be strictly increasing".into(),
            ));
        }
        if kind == SpectrumKind::Auto && values.iter().any(|v| v.re <= 0.0 || v.im != 0.0) {
            return Err(SfwError::InvalidArgument(
                "auto-spectrum samples must be real and strictly positive".into(),
            ));
        }
        Ok(Self { frequencies, values, kind })
    }

    pub fn auto(frequencies: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let values = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Self::new(frequencies, values, SpectrumKind::Auto)
    }

    /// Auto-spectrum without the strict-positivity check, for estimator
    /// output (a zero residual legitimately produces zero bins). Feed such
    /// data through [`crate::estimation::floor_nonpositive`] before using it
    /// in a design.
    pub fn auto_unchecked(frequencies: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let mut s = Self::new(frequencies, vec![Complex64::new(0.0, 0.0); values.len()], SpectrumKind::Cross)?;
        s.kind = SpectrumKind::Auto;
        s.values = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Ok(s)
    }

    /// Interpolate inside the grid; the caller handles extrapolation.
    fn interp(&self, omega: f64) -> Complex64 {
        let f = &self.frequencies;
        let idx = match f.binary_search_by(|x| x.partial_cmp(&omega).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i,
        };
        let (i0, i1) = (idx - 1, idx);
        let lw = omega.ln();
        let (l0, l1) = (f[i0].ln(), f[i1].ln());
        let frac = (lw - l0) / (l1 - l0);
        match self.kind {
            SpectrumKind::Auto => {
                let (v0, v1) = (self.values[i0].re, self.values[i1].re);
                Complex64::new((v0.ln() + frac * (v1.ln() - v0.ln())).exp(), 0.0)
            }
            SpectrumKind::Cross => {
                let (v0, v1) = (self.values[i0], self.values[i1]);
                v0 + (v1 - v0) * frac
            }
        }
    }
}

enum Evaluator {
    /// Closed-form model, valid at every real frequency.
    Analytic(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
    /// Measured samples; extrapolated by the declared power laws.
    Tabulated(TabulatedSpectrum),
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::Analytic(_) => f.write_str("Analytic(..)"),
            Evaluator::Tabulated(t) => write!(f, "Tabulated({} bins)", t.frequencies.len()),
        }
    }
}

/// An evaluable spectrum with a trusted band and declared asymptotics.
///
/// Values are immutable after construction; evaluation is reentrant and safe
/// to share across threads.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    kind: SpectrumKind,
    eval: Arc<Evaluator>,
    /// Trusted evaluation band `[ω_m, ω_M]` in rad/s.
    support: (f64, f64),
    asymptotics: Asymptotics,
}

impl SpectralFunction {
    pub fn auto_analytic<F>(f: F, support: (f64, f64), asymptotics: Asymptotics) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: SpectrumKind::Auto,
            eval: Arc::new(Evaluator::Analytic(Arc::new(move |w| {
                Complex64::new(f(w), 0.0)
            }))),
            support,
            asymptotics,
        }
    }

    pub fn cross_analytic<F>(f: F, support: (f64, f64), asymptotics: Asymptotics) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            kind: SpectrumKind::Cross,
            eval: Arc::new(Evaluator::Analytic(Arc::new(f))),
            support,
            asymptotics,
        }
    }

    pub fn from_table(table: TabulatedSpectrum, asymptotics: Asymptotics) -> Self {
        let support = (
            table.frequencies[0],
            *table.frequencies.last().expect("nonempty"),
        );
        Self {
            kind: table.kind,
            eval: Arc::new(Evaluator::Tabulated(table)),
            support,
            asymptotics,
        }
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn asymptotics(&self) -> &Asymptotics {
        &self.asymptotics
    }

    /// Replace the trusted band without touching the evaluator.
    pub fn with_support(mut self, support: (f64, f64)) -> Self {
        self.support = support;
        self
    }

    /// Evaluate at any real frequency.
    ///
    /// Analytic models evaluate directly. Tabulated spectra interpolate
    /// inside their grid and continue outside it with the declared power law,
    /// matched in value at the grid edge. Negative frequencies use conjugate
    /// symmetry.
    pub fn eval(&self, omega: f64) -> Complex64 {
        match &*self.eval {
            Evaluator::Analytic(f) => f(omega),
            Evaluator::Tabulated(t) => {
                let s = omega.abs();
                let lo = t.frequencies[0];
                let hi = *t.frequencies.last().expect("nonempty");
                let v = if s < lo {
                    t.values[0] * (s / lo).powf(-self.asymptotics.at_zero.exponent)
                } else if s > hi {
                    *t.values.last().expect("nonempty")
                        * (s / hi).powf(-self.asymptotics.at_infinity.exponent)
                } else {
                    t.interp(s)
                };
                if omega < 0.0 {
                    v.conj()
                } else {
                    v
                }
            }
        }
    }

    /// Real part of the value; the whole value for auto-spectra.
    pub fn eval_real(&self, omega: f64) -> f64 {
        self.eval(omega).re
    }

    /// Limit as ω → ∞ implied by this function's evaluation semantics.
    ///
    /// Zero when the declared decay exponent is positive; otherwise the
    /// asymptotic amplitude (analytic case) or the value-matched edge sample
    /// (tabulated case).
    pub fn limit_at_infinity(&self) -> Complex64 {
        if self.asymptotics.at_infinity.exponent > 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match &*self.eval {
            Evaluator::Analytic(_) => {
                Complex64::new(self.asymptotics.at_infinity.amplitude, 0.0)
            }
            Evaluator::Tabulated(t) => *t.values.last().expect("nonempty"),
        }
    }

    /// Pointwise sum of two spectra of the same kind, with combined
    /// asymptotics (the dominant branch at each end).
    pub fn add(a: &SpectralFunction, b: &SpectralFunction) -> SpectralFunction {
        let (a0, b0) = (a.asymptotics, b.asymptotics);
        let support = (a.support.0.min(b.support.0), a.support.1.max(b.support.1));
        let (sa, sb) = (a.clone(), b.clone());
        SpectralFunction {
            kind: a.kind,
            eval: Arc::new(Evaluator::Analytic(Arc::new(move |w| {
                sa.eval(w) + sb.eval(w)
            }))),
            support,
            asymptotics: Asymptotics::new(
                PowerLaw::dominant_at_zero(a0.at_zero, b0.at_zero),
                PowerLaw::dominant_at_infinity(a0.at_infinity, b0.at_infinity),
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// Analytic models
// ---------------------------------------------------------------------------

/// `S(ω) = A γ² / ((|ω| - ω_c)² + γ²)`: a peak of half-width γ at ±ω_c.
pub fn lorentzian_peak(a: f64, gamma: f64, omega_c: f64, support: (f64, f64)) -> SpectralFunction {
    let asym = Asymptotics::new(
        PowerLaw::new(0.0, a * gamma * gamma / (omega_c * omega_c + gamma * gamma)),
        PowerLaw::new(2.0, a * gamma * gamma),
    );
    SpectralFunction::auto_analytic(
        move |w| a * gamma * gamma / ((w.abs() - omega_c).powi(2) + gamma * gamma),
        support,
        asym,
    )
}

/// `S(ω) = amp / |ω|^exponent + floor`.
pub fn powerlaw_plus_white(
    amp: f64,
    exponent: f64,
    floor: f64,
    support: (f64, f64),
) -> SpectralFunction {
    let at_zero = if exponent > 0.0 {
        PowerLaw::new(exponent, amp)
    } else {
        PowerLaw::new(0.0, amp + floor)
    };
    let at_inf = if floor > 0.0 {
        PowerLaw::new(0.0, floor)
    } else {
        PowerLaw::new(exponent, amp)
    };
    SpectralFunction::auto_analytic(
        move |w| amp * w.abs().powf(-exponent) + floor,
        support,
        Asymptotics::new(at_zero, at_inf),
    )
}

/// Flat spectrum `S(ω) = level`.
pub fn white(level: f64, support: (f64, f64)) -> SpectralFunction {
    SpectralFunction::auto_analytic(
        move |_| level,
        support,
        Asymptotics::new(PowerLaw::new(0.0, level), PowerLaw::new(0.0, level)),
    )
}

/// `S(ω) = 2a / (ω² + a²)`: the spectrum of a one-pole (Ornstein-Uhlenbeck)
/// process with unit variance.
pub fn one_pole(a: f64, support: (f64, f64)) -> SpectralFunction {
    SpectralFunction::auto_analytic(
        move |w| 2.0 * a / (w * w + a * a),
        support,
        Asymptotics::new(PowerLaw::new(0.0, 2.0 / a), PowerLaw::new(2.0, 2.0 * a)),
    )
}

/// Reinterpret an auto-spectrum as a cross-spectrum (used when signal and
/// noise are orthogonal, so `S_xy = S_xx`).
pub fn as_cross(s: &SpectralFunction) -> SpectralFunction {
    let inner = s.clone();
    SpectralFunction::cross_analytic(move |w| inner.eval(w), s.support, s.asymptotics)
}

/// The worked example used throughout the tests: a Lorentzian signal peak at
/// ω_c = 20π rad/s (half-width 2π, height 0.9) buried in `5/ω^1.8 + 0.01`
/// noise, with signal and noise orthogonal so that `S_xy = S_xx`.
///
/// Returns `(S_xx, S_nn, S_yy, S_xy)`.
pub fn make_paper_example() -> (
    SpectralFunction,
    SpectralFunction,
    SpectralFunction,
    SpectralFunction,
) {
    // Trusted band of a 1600 s record sampled at 512 Hz.
    let support = (2.0 * std::f64::consts::PI / 1600.0, 512.0 * std::f64::consts::PI);
    let gamma = 2.0 * std::f64::consts::PI;
    let omega_c = 20.0 * std::f64::consts::PI;
    let s_xx = lorentzian_peak(0.9, gamma, omega_c, support);
    let s_nn = powerlaw_plus_white(5.0, 1.8, 0.01, support);
    let s_yy = SpectralFunction::add(&s_xx, &s_nn);
    let s_xy = as_cross(&s_xx);
    (s_xx, s_nn, s_yy, s_xy)
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Feasibility report for a data pair `(S_xy, S_yy)`.
///
/// The design requires `2 α_x - α_y > 1` and `2 β_x - β_y < 1` (square
/// integrability after rescaling) together with strict positivity of the
/// observation spectrum. The strengthened conditions `2 α_x - α_y > 2`,
/// `2 β_x - β_y < 0` upgrade the convergence guarantee from L² to uniform and
/// are reported as a diagnostic.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
    pub high_frequency_ok: bool,
    pub low_frequency_ok: bool,
    pub amplitudes_positive: bool,
    pub syy_positive: bool,
    pub syy_min: f64,
    pub syy_min_omega: f64,
    pub strengthened: bool,
}

impl ValidationReport {
    pub fn feasible(&self) -> bool {
        self.high_frequency_ok
            && self.low_frequency_ok
            && self.amplitudes_positive
            && self.syy_positive
    }

    /// Human-readable list of failed conditions, naming each inequality.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.high_frequency_ok {
            out.push(format!(
                "2*alpha_x - alpha_y > 1 failed ({} - {} = {})",
                2.0 * self.alpha_x,
                self.alpha_y,
                2.0 * self.alpha_x - self.alpha_y
            ));
        }
        if !self.low_frequency_ok {
            out.push(format!(
                "2*beta_x - beta_y < 1 failed ({} - {} = {})",
                2.0 * self.beta_x,
                self.beta_y,
                2.0 * self.beta_x - self.beta_y
            ));
        }
        if !self.amplitudes_positive {
            out.push("asymptotic amplitudes of S_yy must be positive".into());
        }
        if !self.syy_positive {
            out.push(format!(
                "S_yy not strictly positive on the trusted band (min {} at omega = {})",
                self.syy_min, self.syy_min_omega
            ));
        }
        out
    }
}

/// Number of samples used when scanning a band for positivity or extrema.
const SCAN_POINTS: usize = 4096;

/// A logarithmically spaced grid over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (ll, lh) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (ll + (lh - ll) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Check the integrability inequalities and positivity for a data pair.
///
/// Never aborts: infeasible data produces a report whose `failures()` names
/// the violated condition.
pub fn validate_data(s_xy: &SpectralFunction, s_yy: &SpectralFunction) -> ValidationReport {
    let alpha_x = s_xy.asymptotics().at_infinity.exponent;
    let beta_x = s_xy.asymptotics().at_zero.exponent;
    let alpha_y = s_yy.asymptotics().at_infinity.exponent;
    let beta_y = s_yy.asymptotics().at_zero.exponent;
    let a_y = s_yy.asymptotics().at_infinity.amplitude;
    let b_y = s_yy.asymptotics().at_zero.amplitude;

    let (lo, hi) = s_yy.support();
    let grid = log_grid(lo, hi, SCAN_POINTS);
    let vals = par::map_slice(&grid, |&w| s_yy.eval_real(w));
    let mut syy_min = f64::INFINITY;
    let mut syy_min_omega = lo;
    let mut sorted = vals.clone();
    for (w, v) in grid.iter().zip(&vals) {
        if *v < syy_min {
            syy_min = *v;
            syy_min_omega = *w;
        }
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    // "Strictly positive" at finite sampling: a zero between grid points
    // shows up as a value far below the median.
    let syy_positive = syy_min > 0.0 && syy_min > 1e-6 * median;

    ValidationReport {
        alpha_x,
        alpha_y,
        beta_x,
        beta_y,
        high_frequency_ok: 2.0 * alpha_x - alpha_y > 1.0,
        low_frequency_ok: 2.0 * beta_x - beta_y < 1.0,
        amplitudes_positive: a_y > 0.0 && b_y > 0.0,
        syy_positive,
        syy_min,
        syy_min_omega,
        strengthened: 2.0 * alpha_x - alpha_y > 2.0 && 2.0 * beta_x - beta_y < 0.0,
    }
}

// ---------------------------------------------------------------------------
// Error spectrum and variance
// ---------------------------------------------------------------------------

/// Error spectrum at one frequency from already-evaluated quantities:
/// `S_εε = S_xx + |h|² S_yy - 2 Re(h* S_xy)`.
pub fn error_spectrum_value(h: Complex64, s_xx: f64, s_xy: Complex64, s_yy: f64) -> f64 {
    s_xx + h.norm_sqr() * s_yy - 2.0 * (h.conj() * s_xy).re
}

/// Error spectrum of the filter `h` at `omega`.
pub fn eval_error_spectrum<H>(
    h: H,
    s_xx: &SpectralFunction,
    s_xy: &SpectralFunction,
    s_yy: &SpectralFunction,
    omega: f64,
) -> Result<f64>
where
    H: Fn(f64) -> Complex64,
{
    let syy = s_yy.eval_real(omega);
    if !(syy > 0.0) {
        return Err(SfwError::NonPositiveSpectrum { omega, value: syy });
    }
    Ok(error_spectrum_value(
        h(omega),
        s_xx.eval_real(omega),
        s_xy.eval(omega),
        syy,
    ))
}

/// Number of quadrature nodes per side for the error-variance integral.
const VAR_POINTS: usize = 4096;

/// Error variance `V_ε[h] = ∫ S_εε dω / 2π`.
///
/// The trusted band is integrated by trapezoid on a dense log grid (both
/// signs of ω, so complex non-symmetric test filters are handled); the tails
/// are integrated analytically using the declared asymptotic exponents of
/// `S_xx`, with amplitudes matched to the computed error spectrum at the band
/// edges. Divergent tails are reported as an error rather than truncated.
pub fn integrate_error_variance<H>(
    h: H,
    s_xx: &SpectralFunction,
    s_xy: &SpectralFunction,
    s_yy: &SpectralFunction,
) -> Result<f64>
where
    H: Fn(f64) -> Complex64 + Sync,
{
    let (lo_x, hi_x) = s_xx.support();
    let (lo_y, hi_y) = s_yy.support();
    let (lo, hi) = (lo_x.min(lo_y), hi_x.max(hi_y));
    let grid = log_grid(lo, hi, VAR_POINTS);

    let see = par::map_slice(&grid, |&w| {
        let plus = error_spectrum_value(h(w), s_xx.eval_real(w), s_xy.eval(w), s_yy.eval_real(w));
        let minus =
            error_spectrum_value(h(-w), s_xx.eval_real(-w), s_xy.eval(-w), s_yy.eval_real(-w));
        plus + minus
    });

    let mut band = 0.0;
    for i in 1..grid.len() {
        band += 0.5 * (see[i] + see[i - 1]) * (grid[i] - grid[i - 1]);
    }
    band /= 2.0 * std::f64::consts::PI;

    // Tail exponents follow S_xx: feasible filters decay fast enough that the
    // h-dependent terms are subdominant at both ends.
    let tail_hi_exp = s_xx.asymptotics().at_infinity.exponent;
    if tail_hi_exp <= 1.0 {
        return Err(SfwError::DivergentIntegral(format!(
            "high-frequency exponent {tail_hi_exp} <= 1"
        )));
    }
    let edge_hi = 0.5 * see[grid.len() - 1];
    let tail_hi = (edge_hi.max(0.0) * hi / (tail_hi_exp - 1.0)) / std::f64::consts::PI;

    let tail_lo_exp = s_xx.asymptotics().at_zero.exponent;
    if tail_lo_exp >= 1.0 {
        return Err(SfwError::DivergentIntegral(format!(
            "low-frequency exponent {tail_lo_exp} >= 1"
        )));
    }
    let edge_lo = 0.5 * see[0];
    let tail_lo = (edge_lo.max(0.0) * lo / (1.0 - tail_lo_exp)) / std::f64::consts::PI;

    Ok(band + tail_hi + tail_lo)
}

/// Variance of the best *non-causal* filter: `∫ (S_xx - |S_xy|²/S_yy) dω/2π`.
/// A floor for every causal filter.
pub fn noncausal_error_variance(
    s_xx: &SpectralFunction,
    s_xy: &SpectralFunction,
    s_yy: &SpectralFunction,
) -> Result<f64> {
    integrate_error_variance(
        |w| s_xy.eval(w) / s_yy.eval_real(w),
        s_xx,
        s_xy,
        s_yy,
    )
}

/// Signal variance `∫ S_xx dω / 2π` (the error variance of the zero filter).
pub fn signal_variance(s_xx: &SpectralFunction) -> Result<f64> {
    let zero = SpectralFunction::cross_analytic(
        |_| Complex64::new(0.0, 0.0),
        s_xx.support(),
        Asymptotics::new(PowerLaw::new(0.0, 0.0), PowerLaw::new(10.0, 0.0)),
    );
    let one = white(1.0, s_xx.support());
    integrate_error_variance(|_| Complex64::new(0.0, 0.0), s_xx, &zero, &one)
}

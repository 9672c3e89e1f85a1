//! Finite-bandwidth error budget: scale selection, per-coefficient bounds on
//! the Toeplitz and right-hand-side errors induced by a truncated frequency
//! band, the resulting relative filter-error bounds, and the largest
//! truncation size the data can support.
//!
//! Data is only trusted on `[ω_m, ω_M]`. Under the circle map the missing
//! pieces of the integration interval are `[0, u_m]` and `[u_M, π]` with
//! `u_{m,M} = 2 atan(ω_{m,M}/ω₀)`, so every bound below is a function of
//! those two angles. Choosing `ω₀ = √(ω_m ω_M)` balances the ends and gives
//! the `√(ω_m/ω_M)` scaling of the coefficient error.

use num_complex::Complex64;

use crate::error::SfwError;
use crate::spectral::{log_grid, SpectralFunction};
use crate::Result;

/// The geometric-mean scale `ω₀ = √(ω_m ω_M)` that minimizes the
/// band-truncation bound.
pub fn choose_scale(omega_m: f64, omega_max: f64) -> Result<f64> {
    if !(omega_m > 0.0 && omega_m < omega_max) {
        return Err(SfwError::InvalidArgument(format!(
            "need 0 < omega_m < omega_max, got ({omega_m}, {omega_max})"
        )));
    }
    Ok((omega_m * omega_max).sqrt())
}

/// Circle-map angles of the band edges.
pub fn band_angles(omega_m: f64, omega_max: f64, omega_0: f64) -> (f64, f64) {
    (
        2.0 * (omega_m / omega_0).atan(),
        2.0 * (omega_max / omega_0).atan(),
    )
}

/// General per-coefficient bound on the Toeplitz-generator error:
/// `|δt_n| < (1/π) sup(S_yy) (u_m + (π - u_M))`.
pub fn delta_t_bound(sup_syy: f64, omega_m: f64, omega_max: f64, omega_0: f64) -> f64 {
    let (u_m, u_max) = band_angles(omega_m, omega_max, omega_0);
    sup_syy * (u_m + (std::f64::consts::PI - u_max)) / std::f64::consts::PI
}

/// The same bound at the optimal scale: `|δt_n| ≤ (4/π) sup(S_yy) √(ω_m/ω_M)`.
pub fn delta_t_bound_optimal(sup_syy: f64, omega_m: f64, omega_max: f64) -> f64 {
    4.0 * sup_syy * (omega_m / omega_max).sqrt() / std::f64::consts::PI
}

/// Largest truncation size the band still constrains:
/// `n_max = κ⁻¹ √(ω_M/ω_m)`, floored, at least 1.
pub fn n_max(kappa: f64, omega_m: f64, omega_max: f64) -> usize {
    let raw = (omega_max / omega_m).sqrt() / kappa.max(1.0);
    (raw.floor() as usize).max(1)
}

/// Bound on the right-hand-side coefficient error from the missing band
/// ends, in terms of the transformed cross-spectrum envelopes
/// `|S_xy'| ≤ b_bar/|ω|^{β'}` near zero and `a_bar/|ω|^{α'}` near infinity:
///
/// `|δs_n| < (1/π) [ b_bar u_m^{1-β'}/(1-β') + a_bar (π-u_M)^{α'}/α' ]`.
///
/// Requires `β' < 1` and `α' > 0`; outside that range the missing integral
/// diverges and the bound is reported as unrepresentable rather than
/// clamped.
pub fn delta_s_bound(
    beta_prime: f64,
    b_bar: f64,
    alpha_prime: f64,
    a_bar: f64,
    u_m: f64,
    u_max: f64,
) -> Result<f64> {
    if beta_prime >= 1.0 {
        return Err(SfwError::ExponentDomain(format!(
            "low-end exponent beta' = {beta_prime} >= 1: band-truncation integral diverges"
        )));
    }
    if alpha_prime <= 0.0 {
        return Err(SfwError::ExponentDomain(format!(
            "high-end exponent alpha' = {alpha_prime} <= 0: band-truncation integral diverges"
        )));
    }
    let low = b_bar * u_m.powf(1.0 - beta_prime) / (1.0 - beta_prime);
    let high = a_bar * (std::f64::consts::PI - u_max).powf(alpha_prime) / alpha_prime;
    Ok((low + high) / std::f64::consts::PI)
}

/// Envelope amplitudes of a (transformed) cross-spectrum, fitted as the max
/// of `|S(ω)| · |ω|^exponent` over the inner and outer decade of the trusted
/// band.
pub fn fit_envelopes(s_xy: &SpectralFunction) -> (f64, f64) {
    let (lo, hi) = s_xy.support();
    let beta = s_xy.asymptotics().at_zero.exponent;
    let alpha = s_xy.asymptotics().at_infinity.exponent;
    let b_bar = log_grid(lo, lo * 10.0, 64)
        .iter()
        .map(|&w| s_xy.eval(w).norm() * w.powf(beta))
        .fold(0.0, f64::max);
    let a_bar = log_grid(hi / 10.0, hi, 64)
        .iter()
        .map(|&w| s_xy.eval(w).norm() * w.powf(alpha))
        .fold(0.0, f64::max);
    (b_bar, a_bar)
}

/// Relative filter-error bounds.
///
/// The observation-side error admits a chain of two bounds,
/// `n|δt|/inf S_yy'` and `(4nκ/π)√(ω_m/ω_M)`; the tighter one is returned.
/// The cross-spectrum side is `√n κ |δs| / ‖s‖`.
pub fn relative_filter_errors(
    n: usize,
    delta_t: f64,
    inf_syy: f64,
    kappa: f64,
    omega_m: f64,
    omega_max: f64,
    delta_s: Option<f64>,
    s_norm: f64,
) -> (f64, Option<f64>) {
    let direct = n as f64 * delta_t / inf_syy;
    let folded = 4.0 * n as f64 * kappa * (omega_m / omega_max).sqrt() / std::f64::consts::PI;
    let rel_y = direct.min(folded);
    let rel_x = delta_s.map(|ds| (n as f64).sqrt() * kappa * ds / s_norm);
    (rel_y, rel_x)
}

/// The assembled budget attached to a designed filter and echoed in run
/// manifests.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ErrorBudget {
    pub omega_m: f64,
    #[serde(rename = "omega_M")]
    pub omega_max: f64,
    pub omega_0: f64,
    pub inf_syy: f64,
    pub sup_syy: f64,
    /// Condition number used in the bounds (measured when available,
    /// otherwise the sup/inf bound).
    pub kappa: f64,
    pub delta_t_bound: f64,
    pub delta_s_bound: Option<f64>,
    pub rel_err_y: f64,
    pub rel_err_x: Option<f64>,
    /// Which of the two relative errors dominates.
    pub dominant: &'static str,
    pub n_max: usize,
    pub n_used: usize,
    pub warnings: Vec<String>,
}

/// Assemble the complete budget for a design run.
#[allow(clippy::too_many_arguments)]
pub fn assemble(
    omega_m: f64,
    omega_max: f64,
    omega_0: f64,
    bounds: (f64, f64),
    kappa: f64,
    n_used: usize,
    s_xy_prime: &SpectralFunction,
    s: &[Complex64],
) -> ErrorBudget {
    let mut warnings = Vec::new();
    if omega_0 < 10.0 * omega_m || omega_max < 10.0 * omega_0 {
        warnings.push(format!(
            "band does not straddle the scale comfortably: omega_m = {omega_m}, omega_0 = {omega_0}, omega_max = {omega_max}"
        ));
    }
    let (u_m, u_max) = band_angles(omega_m, omega_max, omega_0);
    let dt = delta_t_bound(bounds.1, omega_m, omega_max, omega_0);
    let (b_bar, a_bar) = fit_envelopes(s_xy_prime);
    let ds = match delta_s_bound(
        s_xy_prime.asymptotics().at_zero.exponent,
        b_bar,
        s_xy_prime.asymptotics().at_infinity.exponent,
        a_bar,
        u_m,
        u_max,
    ) {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(e.to_string());
            None
        }
    };
    let nm = n_max(kappa, omega_m, omega_max);
    if n_used > nm {
        warnings.push(format!(
            "requested truncation n = {n_used} exceeds n_max = {nm}; finite-band error bounds saturate"
        ));
    }
    let s_norm = s.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let (rel_y, rel_x) = relative_filter_errors(
        n_used,
        dt,
        bounds.0,
        kappa,
        omega_m,
        omega_max,
        ds,
        s_norm,
    );
    let dominant = match rel_x {
        Some(rx) if rx > rel_y => "rel_err_x",
        _ => "rel_err_y",
    };
    ErrorBudget {
        omega_m,
        omega_max,
        omega_0,
        inf_syy: bounds.0,
        sup_syy: bounds.1,
        kappa,
        delta_t_bound: dt,
        delta_s_bound: ds,
        rel_err_y: rel_y,
        rel_err_x: rel_x,
        dominant,
        n_max: nm,
        n_used,
        warnings,
    }
}

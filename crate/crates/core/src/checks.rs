//! Self-verification suites: oracle cross-checks and invariant tests
//! runnable on demand (the CLI `verify` command) and reused by the
//! integration tests.

use num_complex::Complex64;

use crate::basis::{self, discrete_hilbert, eval_phi, BasisConfig};
use crate::design::{design, DesignOptions};
use crate::oracle;
use crate::precondition::{transform, ScalingFunction};
use crate::spectral::{self, log_grid, make_paper_example, SpectralFunction};
use crate::toeplitz::ToeplitzSystem;
use crate::Result;

/// Outcome of one verification check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// The measured figure of merit (smaller is better unless noted).
    pub metric: f64,
    pub threshold: f64,
    pub details: String,
}

impl CheckResult {
    fn new(name: &str, metric: f64, threshold: f64, details: String) -> Self {
        CheckResult {
            name: name.to_string(),
            pass: metric <= threshold,
            metric,
            threshold,
            details,
        }
    }
}

/// Gram-matrix defect of the first 65 basis modes under FFT quadrature.
pub fn check_orthonormality() -> CheckResult {
    let defect = basis::orthonormality_defect(64, 1.0, 1 << 14);
    CheckResult::new(
        "orthonormality",
        defect,
        1e-10,
        "max |<phi_j, phi_k> - delta_jk| for j,k <= 64".into(),
    )
}

/// Discrete Hilbert transform eigenvalue relation on the first causal and
/// anticausal modes.
pub fn check_hilbert_eigen() -> CheckResult {
    let n = 1 << 16;
    let half_width = 800.0;
    let lattice: Vec<f64> = (0..n)
        .map(|j| -half_width + 2.0 * half_width * j as f64 / (n - 1) as f64)
        .collect();
    let mut worst: f64 = 0.0;
    for (k, sign) in [(0i64, 1.0f64), (-1, -1.0)] {
        let samples: Vec<Complex64> = lattice.iter().map(|&w| eval_phi(k, w, 1.0)).collect();
        let h = discrete_hilbert(&samples);
        for (j, &w) in lattice.iter().enumerate() {
            if w.abs() > 40.0 {
                continue;
            }
            let expect = Complex64::new(0.0, -sign) * samples[j];
            worst = worst.max((h[j] - expect).norm());
        }
    }
    CheckResult::new(
        "hilbert-eigen",
        worst,
        1e-3,
        "sup |H[phi_k] + i sgn(k) phi_k| on the interior lattice".into(),
    )
}

/// Design options used for the worked example in the checks.
pub fn paper_design_opts(n: usize) -> DesignOptions {
    DesignOptions {
        n_modes: Some(n),
        omega_0: Some(30.0),
        quad_points: Some(1 << 14),
        ..DesignOptions::default()
    }
}

/// Relative L² distance between two responses over a log grid on `[lo, hi]`.
pub fn relative_l2<F, G>(f: F, g: G, lo: f64, hi: f64, points: usize) -> f64
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    let grid = log_grid(lo, hi, points);
    let mut num = 0.0;
    let mut den = 0.0;
    for &w in &grid {
        for sign in [-1.0, 1.0] {
            let a = f(sign * w);
            let b = g(sign * w);
            num += (a - b).norm_sqr();
            den += b.norm_sqr();
        }
    }
    (num / den).sqrt()
}

/// The rational-spectrum ground truth: the pipeline must reduce to the
/// classical closed-form causal filter for a one-pole signal in white noise.
pub fn check_rational_benchmark() -> Result<CheckResult> {
    let a = 1.0;
    let sup = (1e-3, 1e3);
    let s_xx = spectral::one_pole(a, sup);
    let s_yy = SpectralFunction::add(&s_xx, &spectral::white(1.0, sup));
    let s_xy = spectral::as_cross(&s_xx);
    let opts = DesignOptions {
        n_modes: Some(100),
        omega_0: Some(1.0),
        ..DesignOptions::default()
    };
    let flt = design(&s_xy, &s_yy, &opts)?;
    let b = (a * a + 2.0 * a).sqrt();
    let rel = relative_l2(
        |w| flt.response_at(w),
        |w| 2.0 * a / ((a + b) * Complex64::new(b, -w)),
        1e-3,
        1e3,
        512,
    );
    Ok(CheckResult::new(
        "rational-benchmark",
        rel,
        1e-3,
        "relative L2 distance to the closed-form causal filter at n = 100".into(),
    ))
}

/// Toeplitz spectrum bounds on the preconditioned worked example at n = 256.
pub fn check_toeplitz_bounds() -> Result<CheckResult> {
    let (_, _, s_yy, s_xy) = make_paper_example();
    let scaling = ScalingFunction::new(0.0, 0.9, 5.0, 0.0)?;
    let tp = transform(&s_xy, &s_yy, scaling)?;
    let cfg = BasisConfig::new(5.0, 256, 1 << 15)?;
    let coeffs = basis::compute_coefficients(&tp.s_xy, &tp.s_yy, &cfg)?;
    let sys = ToeplitzSystem::new(coeffs.t, coeffs.s)?;
    // Cholesky must succeed (positive definiteness).
    sys.solve()?;
    let eigs = sys.dense().symmetric_eigenvalues();
    let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-8 * tp.bounds.1;
    let below = (tp.bounds.0 - lo).max(0.0);
    let above = (hi - tp.bounds.1).max(0.0);
    Ok(CheckResult::new(
        "toeplitz-bounds",
        below.max(above),
        tol,
        format!(
            "eigenvalues in [{:.6}, {:.6}] vs spectrum bounds [{:.6}, {:.6}]",
            lo, hi, tp.bounds.0, tp.bounds.1
        ),
    ))
}

/// Condition-number sandwich `1 + v/t0 ≤ κ ≤ sup/inf` on the worked example
/// and the rational benchmark at several sizes. The metric is the largest
/// bound violation (0 when all hold).
pub fn check_condition_sandwich() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut details = String::new();
    // Paper example, preconditioned.
    let (_, _, s_yy, s_xy) = make_paper_example();
    let tp = transform(&s_xy, &s_yy, ScalingFunction::new(0.0, 0.9, 5.0, 0.0)?)?;
    // Rational benchmark (no rescaling needed).
    let sup = (1e-3, 1e3);
    let s_xx_r = spectral::one_pole(1.0, sup);
    let s_yy_r = SpectralFunction::add(&s_xx_r, &spectral::white(1.0, sup));
    let s_xy_r = spectral::as_cross(&s_xx_r);
    let tp_r = transform(&s_xy_r, &s_yy_r, ScalingFunction::identity())?;
    for (label, t) in [("paper", &tp), ("rational", &tp_r)] {
        for n in [16usize, 64, 256] {
            let cfg = BasisConfig::auto_quad(
                if *label == *"paper" { 5.0 } else { 1.0 },
                n,
                4096,
            )?;
            let coeffs = basis::compute_coefficients(&t.s_xy, &t.s_yy, &cfg)?;
            let sys = ToeplitzSystem::new(coeffs.t, coeffs.s)?;
            let rep = sys.condition_report(t.bounds);
            let kappa = rep.measured_kappa().expect("dense size");
            let lo_violation = (rep.kappa_lower - kappa).max(0.0);
            let hi_violation = (kappa - rep.kappa_upper).max(0.0);
            worst = worst.max(lo_violation.max(hi_violation));
            details.push_str(&format!(
                "{label} n={n}: {:.4} <= {:.4} <= {:.4}; ",
                rep.kappa_lower, kappa, rep.kappa_upper
            ));
        }
    }
    Ok(CheckResult::new(
        "condition-sandwich",
        worst,
        1e-9,
        details,
    ))
}

/// Agreement between the eigenbasis design and the time-lattice Wiener-Hopf
/// oracle on the scale-free worked example.
pub fn check_lattice_agreement() -> Result<CheckResult> {
    let (_, _, s_yy, s_xy) = make_paper_example();
    let flt = design(&s_xy, &s_yy, &paper_design_opts(256))?;
    let lattice = oracle::lattice_causal_filter(&s_xy, &s_yy, 32768, 1.0 / 4096.0)?;
    let (lo, hi) = s_yy.support();
    let rel = relative_l2(
        |w| flt.response_at(w),
        |w| lattice.response_midpoint_at(w),
        lo,
        hi,
        512,
    );
    Ok(CheckResult::new(
        "lattice-agreement",
        rel,
        0.01,
        "relative L2 distance between eigenbasis design and lattice oracle".into(),
    ))
}

/// Run the named suite ("all" runs everything).
pub fn run_suite(selector: &str) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let all = selector == "all";
    if all || selector == "orthonormality" {
        out.push(check_orthonormality());
    }
    if all || selector == "hilbert-eigen" {
        out.push(check_hilbert_eigen());
    }
    if all || selector == "rational-benchmark" {
        out.push(check_rational_benchmark()?);
    }
    if all || selector == "toeplitz-bounds" {
        out.push(check_toeplitz_bounds()?);
    }
    if all || selector == "condition-sandwich" {
        out.push(check_condition_sandwich()?);
    }
    if all || selector == "lattice-agreement" {
        out.push(check_lattice_agreement()?);
    }
    if out.is_empty() {
        return Err(crate::SfwError::InvalidArgument(format!(
            "unknown verify suite {selector:?}; available: all, orthonormality, hilbert-eigen, rational-benchmark, toeplitz-bounds, condition-sandwich, lattice-agreement"
        )));
    }
    Ok(out)
}

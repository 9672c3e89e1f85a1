//! Symmetric positive-definite Toeplitz systems: assembly, solving,
//! conditioning bounds and spectrum checks.
//!
//! The generator `t_k` comes from a strictly positive spectrum, which makes
//! every truncation positive definite with eigenvalues confined to
//! `[inf S, sup S]`. The default solver is dense Cholesky (truncation sizes
//! are small by design); Levinson recursion is available behind the same
//! interface as an O(n²) alternative and is cross-checked against it. No
//! regularization is applied by default: a factorization failure means the
//! upstream spectrum dipped non-positive and must surface. An opt-in jitter
//! exists for exploratory use and is reported in the solution.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::SfwError;
use crate::Result;

/// Truncated system `T h = s` with `T_{jk} = t_{|j-k|}`.
#[derive(Debug, Clone)]
pub struct ToeplitzSystem {
    /// Real symmetric generator `t_0..t_{n-1}`.
    pub t: Vec<f64>,
    /// Complex right-hand side `s_0..s_{n-1}`.
    pub s: Vec<Complex64>,
}

/// How to factor the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum SolverKind {
    /// Dense Cholesky on the explicit matrix.
    #[default]
    Cholesky,
    /// Levinson recursion, O(n²).
    Levinson,
}

/// Conditioning bounds for a truncation.
///
/// `kappa_lower = 1 + v/t₀` with `v² = 2 Σ_{k≥1} t_k²(n-k)/n` is valid for
/// any symmetric Toeplitz matrix; `kappa_upper = sup S / inf S` needs the
/// generator to come from a spectrum bounded away from zero. Measured extreme
/// eigenvalues are attached for sizes where a dense solve is cheap.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionReport {
    pub n: usize,
    pub v: f64,
    pub kappa_lower: f64,
    pub kappa_upper: f64,
    pub eig_min_bound: f64,
    pub eig_max_bound: f64,
    pub measured_extremes: Option<(f64, f64)>,
}

impl ConditionReport {
    pub fn measured_kappa(&self) -> Option<f64> {
        self.measured_extremes.map(|(lo, hi)| hi / lo)
    }
}

/// Largest size for which dense eigensolves are considered cheap.
pub const DENSE_EIG_LIMIT: usize = 512;

/// Condition number above which solutions carry an ill-conditioning warning.
pub const ILL_CONDITIONED: f64 = 1e12;

impl ToeplitzSystem {
    pub fn new(t: Vec<f64>, s: Vec<Complex64>) -> Result<Self> {
        if t.is_empty() || t.len() != s.len() {
            return Err(SfwError::InvalidArgument(
                "Toeplitz generator and right-hand side must have equal nonzero length".into(),
            ));
        }
        if !(t[0] > 0.0) {
            return Err(SfwError::InvalidArgument(format!(
                "t_0 must be positive, got {}",
                t[0]
            )));
        }
        Ok(Self { t, s })
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// The explicit dense matrix.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.t[i.abs_diff(j)])
    }

    /// A leading principal subsystem of size `m ≤ n` (same generator, shorter
    /// right-hand side). Useful for nested-truncation diagnostics.
    pub fn truncate(&self, m: usize) -> ToeplitzSystem {
        let m = m.min(self.n());
        ToeplitzSystem {
            t: self.t[..m].to_vec(),
            s: self.s[..m].to_vec(),
        }
    }

    /// Solve with the requested factorization. `jitter` adds
    /// `1e-12 t₀` to the diagonal before factoring — off by default, loud
    /// when used (the returned flag).
    pub fn solve_with(&self, solver: SolverKind, jitter: bool) -> Result<Vec<Complex64>> {
        let mut t = self.t.clone();
        if jitter {
            t[0] += 1e-12 * self.t[0];
        }
        match solver {
            SolverKind::Cholesky => solve_cholesky(&t, &self.s),
            SolverKind::Levinson => solve_levinson(&t, &self.s),
        }
    }

    /// Solve with dense Cholesky (the default path).
    pub fn solve(&self) -> Result<Vec<Complex64>> {
        self.solve_with(SolverKind::Cholesky, false)
    }

    /// Euclidean norm of `T h - s`.
    pub fn residual_norm(&self, h: &[Complex64]) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += self.t[i.abs_diff(j)] * h[j];
            }
            acc += (row - self.s[i]).norm_sqr();
        }
        acc.sqrt()
    }

    /// Conditioning bounds given `(inf, sup)` of the generating spectrum.
    pub fn condition_report(&self, bounds: (f64, f64)) -> ConditionReport {
        let n = self.n();
        let mut v2 = 0.0;
        for k in 1..n {
            v2 += self.t[k] * self.t[k] * (n - k) as f64;
        }
        let v = (2.0 * v2 / n as f64).sqrt();
        let measured = if n <= DENSE_EIG_LIMIT {
            let eigs = self.dense().symmetric_eigenvalues();
            let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Some((lo, hi))
        } else {
            None
        };
        ConditionReport {
            n,
            v,
            kappa_lower: 1.0 + v / self.t[0],
            kappa_upper: bounds.1 / bounds.0,
            eig_min_bound: bounds.0,
            eig_max_bound: bounds.1,
            measured_extremes: measured,
        }
    }

    /// True iff every eigenvalue lies in `[inf - tol, sup + tol]` with
    /// `tol = 1e-8 · sup`. Requires `n ≤ 512` (dense eigensolve).
    pub fn spectrum_bounds_check(&self, bounds: (f64, f64)) -> Result<bool> {
        if self.n() > DENSE_EIG_LIMIT {
            return Err(SfwError::InvalidArgument(format!(
                "dense eigensolve limited to n <= {DENSE_EIG_LIMIT}"
            )));
        }
        let tol = 1e-8 * bounds.1;
        let eigs = self.dense().symmetric_eigenvalues();
        Ok(eigs
            .iter()
            .all(|&e| e >= bounds.0 - tol && e <= bounds.1 + tol))
    }
}

/// Dense Cholesky solve: the complex right-hand side splits into two real
/// solves sharing one factorization.
fn solve_cholesky(t: &[f64], s: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = t.len();
    let m = DMatrix::from_fn(n, n, |i, j| t[i.abs_diff(j)]);
    let chol = m
        .cholesky()
        .ok_or(SfwError::NotPositiveDefinite { order: n })?;
    let re = DVector::from_iterator(n, s.iter().map(|c| c.re));
    let im = DVector::from_iterator(n, s.iter().map(|c| c.im));
    let xre = chol.solve(&re);
    let xim = chol.solve(&im);
    Ok((0..n).map(|i| Complex64::new(xre[i], xim[i])).collect())
}

/// Levinson recursion for a real symmetric Toeplitz system with a complex
/// right-hand side.
fn solve_levinson(t: &[f64], s: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = t.len();
    if !(t[0] > 0.0) {
        return Err(SfwError::NotPositiveDefinite { order: 1 });
    }
    // f solves T_k f = e_0; x carries the solution of the leading system.
    let mut f = vec![0.0f64; n];
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    f[0] = 1.0 / t[0];
    x[0] = s[0] / t[0];
    let mut scratch = vec![0.0f64; n];
    for k in 1..n {
        // Extension error of the forward vector.
        let mut ef = 0.0;
        for i in 0..k {
            ef += t[k - i] * f[i];
        }
        let denom = 1.0 - ef * ef;
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(SfwError::NotPositiveDefinite { order: k + 1 });
        }
        let inv = 1.0 / denom;
        // f_new = (f,0)/D - ef (0,rev f)/D, using the symmetry of T.
        scratch[..k].copy_from_slice(&f[..k]);
        for i in 0..=k {
            let a = if i < k { scratch[i] } else { 0.0 };
            let b = if i == 0 { 0.0 } else { scratch[k - i] };
            f[i] = (a - ef * b) * inv;
        }
        // Extension error of the solution, then correct along rev(f).
        let mut ex = Complex64::new(0.0, 0.0);
        for i in 0..k {
            ex += t[k - i] * x[i];
        }
        let gain = s[k] - ex;
        for i in 0..=k {
            x[i] += gain * f[k - i];
        }
    }
    Ok(x)
}

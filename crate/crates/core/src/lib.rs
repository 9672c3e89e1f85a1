//! Causal Wiener filter design for measurements contaminated by noise with
//! scale-free (power-law) spectra.
//!
//! The classical route to a causal Wiener filter runs through Wiener-Hopf
//! spectral factorization, which requires the observation spectrum to be a
//! rational function of frequency. This crate takes a different route that
//! stays valid for non-rational, scale-free spectra:
//!
//! 1. rescale the data by an analytic power-law function so that it becomes
//!    square-integrable ([`precondition`]),
//! 2. expand the filter in an orthonormal eigenbasis of the Hilbert
//!    transform, which turns the causality constraint into a plain index
//!    restriction ([`basis`]),
//! 3. solve the resulting symmetric positive-definite Toeplitz system
//!    ([`toeplitz`]),
//! 4. report conditioning and finite-bandwidth error bounds alongside the
//!    filter ([`budget`]).
//!
//! [`design::design`] orchestrates the full pipeline. [`estimation`],
//! [`simulate`] and [`oracle`] provide the measurement chain, synthetic data
//! and independent reference solvers used to validate it; [`streaming`]
//! applies the pipeline block-by-block to live data.
//!
//! The data-parallel inner loops (grid evaluation, Welch segments, synthesis
//! bins) run on rayon when the default `parallel` feature is enabled and fall
//! back to sequential iteration without it. Reductions are ordered either
//! way, so results are bit-identical across both modes and any thread count.

pub mod basis;
pub mod budget;
pub mod checks;
pub mod design;
pub mod error;
pub mod estimation;
pub mod io;
pub mod oracle;
mod par;
pub mod precondition;
pub mod simulate;
pub mod spectral;
pub mod streaming;
pub mod timeseries;
pub mod toeplitz;

pub use error::SfwError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SfwError>;

pub use num_complex::Complex64;

//! `sfw`: causal Wiener filters for signals buried in scale-free noise.
//!
//! Subcommands: `simulate` (synthetic records from model spectra), `design`
//! (build a filter from analytic or estimated spectra), `apply` (run a
//! designed filter over recorded or streaming data) and `verify` (oracle
//! cross-checks). Every run writes one JSON manifest next to its outputs.
//!
//! Exit codes: 0 success, 2 usage or I/O, 3 data validation, 4 numerical
//! failure.

mod commands;
mod config;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "sfw", version, about = "Causal Wiener filtering for scale-free noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic signal/noise/measurement series from model spectra.
    Simulate {
        /// JSON configuration (duration, rate, seed, signal and noise models).
        #[arg(long)]
        config: std::path::PathBuf,
        /// Output directory (created if missing).
        #[arg(long, default_value = ".")]
        out: std::path::PathBuf,
    },
    /// Design a causal filter from spectra (analytic models, CSV tables, or
    /// series estimated on the fly).
    Design {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long, default_value = ".")]
        out: std::path::PathBuf,
    },
    /// Apply a designed filter to a series.
    Apply {
        /// Filter JSON produced by `design`.
        #[arg(long)]
        filter: std::path::PathBuf,
        /// Input measurement series (CSV `t,value` or raw f64 with sidecar).
        #[arg(long)]
        input: std::path::PathBuf,
        /// `recorded` (fixed filter) or `stream` (on-line redesign).
        #[arg(long, default_value = "recorded")]
        mode: String,
        /// True-signal series for residual error spectra (optional).
        #[arg(long)]
        truth: Option<std::path::PathBuf>,
        /// Streaming configuration JSON (required for `--mode stream`).
        #[arg(long)]
        config: Option<std::path::PathBuf>,
        /// Number of FIR taps to realize.
        #[arg(long, default_value_t = 4096)]
        taps: usize,
        #[arg(long, default_value = ".")]
        out: std::path::PathBuf,
    },
    /// Run a verification suite and report machine-readable pass/fail.
    Verify {
        /// Suite selector (`all`, `orthonormality`, `hilbert-eigen`,
        /// `rational-benchmark`, `toeplitz-bounds`, `condition-sandwich`,
        /// `lattice-agreement`).
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value = ".")]
        out: std::path::PathBuf,
    },
}

fn init_threads() {
    if let Ok(v) = std::env::var("SFW_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out } => commands::simulate(&config, &out),
        Command::Design { config, out } => commands::design(&config, &out),
        Command::Apply {
            filter,
            input,
            mode,
            truth,
            config,
            taps,
            out,
        } => commands::apply(&filter, &input, &mode, truth.as_deref(), config.as_deref(), taps, &out),
        Command::Verify { suite, out } => commands::verify(&suite, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code_for(&e))
        }
    }
}

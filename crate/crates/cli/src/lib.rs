//! Command-line front end for the KPGM model.
//!
//! ```text
//! kpgm <energies|wavefunction|thermo|validate> --config <path>
//!      [--out <path>] [--format csv|json] [--dry-run]
//! ```
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 computation
//! failure, failed hard validation check, or unwritable output.
//! `KPGM_THREADS` caps the worker pool used by parallel sweeps.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{parse_config, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

pub const THREADS_ENV: &str = "KPGM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "kpgm", version, about = "Kratzer plus generalized Morse model: spectra, wavefunctions, thermodynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file; overrides `output` in the config. Defaults to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format; overrides `format` in the config.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Parse and validate the config, print it in canonical form, and stop.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy table: printed spectrum, compact form and NU-condition residual.
    Energies,
    /// Radial wavefunction and density samples.
    Wavefunction,
    /// Partition function and thermodynamic functions over a beta sweep.
    Thermo,
    /// Run the oracle suite; exits 2 if any hard check fails.
    Validate {
        /// Flip the sign of Q2 in the closed forms (negative control).
        #[arg(long)]
        corrupt_q2: bool,
    },
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{THREADS_ENV}: {e}")),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got `{v}`")),
        },
    }
}

/// Runs the tool with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match threads_from_env() {
        Ok(Some(n)) => {
            // a pool already installed by an earlier call in the same process is kept
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(None) => {}
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    }
    let Some(path) = cli.config.as_ref() else {
        let _ = writeln!(stderr, "error: --config <PATH> is required");
        return EXIT_USAGE;
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    if let Some(out) = cli.out {
        cfg.output = Some(out);
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    if cli.dry_run {
        let _ = stdout.write_all(cfg.to_text().as_bytes());
        return EXIT_OK;
    }

    let outcome = match &cli.command {
        Command::Energies => commands::energies(&cfg),
        Command::Wavefunction => commands::wavefunction(&cfg),
        Command::Thermo => commands::thermo(&cfg),
        Command::Validate { corrupt_q2 } => commands::validate_cmd(&cfg, *corrupt_q2),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    let rendered = outcome.document.render(cfg.format);
    let written = match &cfg.output {
        Some(p) => std::fs::write(p, rendered).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => stdout.write_all(rendered.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_FAILURE;
    }
    match outcome.failure {
        Some(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
        None => EXIT_OK,
    }
}

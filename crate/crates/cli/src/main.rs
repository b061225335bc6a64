//! `mdprolate`: spectra, dictionaries and self-checks for multiband
//! time- and band-limiting operators.
//!
//! Exit codes: 0 on success, 1 when a check fails or a computation breaks,
//! 2 for configuration and input errors (reported as JSON on stderr).

mod approx;
mod bands;
mod config;
mod dict;
mod error;
mod report;
mod spectrum;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, GridArg, RunConfig, SizingRule};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "mdprolate", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the operator described by a band file.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Also write the eigenvectors (needs --out).
        #[arg(long)]
        vectors: bool,
    },
    /// Build the eigen-tensor and modulated-DPSS dictionaries and compare
    /// their spans.
    Dict {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sizing: SizingArgs,
        /// Pass threshold for the subspace angle cosine.
        #[arg(long, default_value_t = 0.95)]
        min_cos: f64,
        /// Write both dictionaries as CSV matrices plus manifests (needs --out).
        #[arg(long)]
        export: bool,
    },
    /// Monte-Carlo approximation error of the leading eigen-tensors.
    Approx {
        #[command(flatten)]
        common: Common,
        /// Number of leading eigen-tensors; defaults to Σ⌈MN‖W_i‖(1+ε)⌉.
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        /// Allowed relative gap between empirical and analytic error.
        #[arg(long, default_value_t = 0.1)]
        tolerance: f64,
    },
    /// Run the invariant suite and report one row per check.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, hide = true)]
        corrupt_kernel: Option<f64>,
    },
    /// Band file utilities.
    Bands {
        #[command(subcommand)]
        action: BandsAction,
    },
}

#[derive(Subcommand)]
enum BandsAction {
    /// Check a band file and print its measure.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Band file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; without it results go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    eps: Option<f64>,
    /// Grid override, e.g. `32x32` or `256`.
    #[arg(long)]
    grid: Option<GridArg>,
}

#[derive(Args)]
struct SizingArgs {
    /// Which side gets the (1+ε) count.
    #[arg(long, value_enum, default_value_t = config::SizingMode::PhiCoversPsi)]
    sizing: config::SizingMode,
    /// Explicit Φ size; requires --q.
    #[arg(long, requires = "q")]
    p: Option<usize>,
    /// Explicit per-band Ψ sizes, comma separated; requires --p.
    #[arg(long, value_delimiter = ',', requires = "p")]
    q: Option<Vec<usize>>,
}

impl Common {
    fn into_config(self, default_eps: f64, trials: usize, sizing: SizingRule) -> Result<RunConfig, CliError> {
        RunConfig::new(config::RunOptions {
            bands_path: self.config,
            grid: self.grid,
            eps: self.eps.unwrap_or(default_eps),
            sizing,
            trials,
            seed: self.seed,
            out: self.out,
            format: self.format,
        })
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    config::apply_thread_limit()?;
    match cli.command {
        Command::Spectrum { common, vectors } => {
            let cfg = common.into_config(0.05, 1, SizingRule::PhiCoversPsi)?;
            spectrum::run(&cfg, vectors)
        }
        Command::Dict {
            common,
            sizing,
            min_cos,
            export,
        } => {
            let rule = match (sizing.p, sizing.q) {
                (Some(p), Some(q)) => SizingRule::Explicit { p, q },
                _ => sizing.sizing.into(),
            };
            let cfg = common.into_config(0.2, 1, rule)?;
            dict::run(&cfg, min_cos, export)
        }
        Command::Approx {
            common,
            p,
            trials,
            tolerance,
        } => {
            let cfg = common.into_config(0.2, trials, SizingRule::PhiCoversPsi)?;
            approx::run(&cfg, p, tolerance)
        }
        Command::Verify {
            common,
            trials,
            corrupt_kernel,
        } => {
            let cfg = common.into_config(0.05, trials, SizingRule::PhiCoversPsi)?;
            verify::run(&cfg, corrupt_kernel)
        }
        Command::Bands {
            action: BandsAction::Validate { config },
        } => bands::validate(&config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

//! `decohere`: batch front end for intrinsic-decoherence computations.

mod commands;
mod config;
mod error;
mod output;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use decohere_core::DecoherenceParams;

use crate::config::{parse_config, RunConfig};
use crate::error::{CliError, CliResult};
use crate::scenario::{parse_grid, ScenarioArgs};

#[derive(Debug, Parser)]
#[command(name = "decohere", version, about = "Gamma-averaged Liouville evolution with reproducible CSV output")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate a configured system over its time grid.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate decay rates and frequency shifts.
    Rates {
        #[arg(long)]
        tau1: f64,
        #[arg(long)]
        tau2: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Comma-separated angular frequencies.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        omega: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the built-in physical scenarios.
    Scenario(ScenarioArgs),
    /// Monte-Carlo estimate of the averaged state next to the closed form.
    Mc {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        samples: usize,
        /// Overrides the configuration seed; 0 if neither is given.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the time-energy inequality; exit code 3 on a violation.
    TmCheck {
        #[arg(long, required_unless_present = "fuzz")]
        config: Option<PathBuf>,
        /// Observable name from the configuration, or `H` for the Hamiltonian.
        #[arg(long, required_unless_present = "fuzz")]
        observable: Option<String>,
        #[arg(long, required_unless_present = "fuzz")]
        t: Option<f64>,
        /// Check this many random systems instead of a configuration.
        #[arg(long)]
        fuzz: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the waiting-time density at time `t`.
    Dist {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        tau1: f64,
        #[arg(long)]
        tau2: f64,
        /// Effective-time grid `a:b:n`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn output_path<'a>(flag: &'a Option<PathBuf>, cfg: &'a RunConfig) -> Option<&'a Path> {
    flag.as_deref().or(cfg.output.as_deref())
}

/// Worker count from `DECOHERE_THREADS`; 0 leaves the choice to the pool.
fn workers() -> CliResult<usize> {
    match std::env::var("DECOHERE_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("DECOHERE_THREADS: expected a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Evolve { config, out } => {
            let cfg = load(&config)?;
            let sys = cfg.build()?;
            commands::evolve(&sys, &cfg.track_elements, cfg.seed)?.write_to(output_path(&out, &cfg))
        }
        Command::Rates { tau1, tau2, hbar, omega, out } => {
            let p = DecoherenceParams::with_hbar(tau1, tau2, hbar)?;
            commands::rates(&omega, &p)?.write_to(out.as_deref())
        }
        Command::Scenario(args) => scenario::run(&args)?.write_to(args.out.as_deref()),
        Command::Mc { config, samples, seed, out } => {
            let workers = workers()?;
            let cfg = load(&config)?;
            let sys = cfg.build()?;
            let seed = seed.or(cfg.seed).unwrap_or(0);
            commands::mc(&sys, &cfg.track_elements, samples, seed, workers)?.write_to(output_path(&out, &cfg))
        }
        Command::TmCheck { config, observable, t, fuzz, seed, out } => {
            let (outcome, path) = match fuzz {
                Some(n) => (commands::tm_fuzz(n, seed.unwrap_or(0))?, out),
                None => {
                    let cfg = load(config.as_deref().expect("required by clap"))?;
                    let sys = cfg.build()?;
                    let t = t.expect("required by clap");
                    let name = observable.expect("required by clap");
                    let path = out.or_else(|| cfg.output.clone());
                    (commands::tm_single(&sys, &name, t, seed.or(cfg.seed))?, path)
                }
            };
            outcome.report.write_to(path.as_deref())?;
            if outcome.violations > 0 {
                return Err(CliError::numeric(format!(
                    "time-energy inequality violated in {} case(s)",
                    outcome.violations
                )));
            }
            Ok(())
        }
        Command::Dist { t, tau1, tau2, grid, out } => {
            let p = DecoherenceParams::new(tau1, tau2)?;
            let g = parse_grid(&grid, "--grid")?;
            commands::dist(t, &p, g)?.write_to(out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("decohere: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

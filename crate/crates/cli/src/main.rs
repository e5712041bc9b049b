//! `bgk`: scans, evolution runs and the verification suite for the
//! linearized scalar BGK model.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use bgk_spectral::evolution::Method;
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::{Format, RunConfig, Sampling};
use output::Sink;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("tolerance not met: {0}")]
    Tolerance(String),
    #[error("oracle disagreement: {0}")]
    Inconsistency(String),
}

#[derive(Parser, Debug)]
#[command(name = "bgk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Frequencies: `a,b,c` or `start:end:count`
    #[arg(long, global = true, allow_hyphen_values = true)]
    xi: Option<String>,

    /// Output times: `a,b,c` or `start:end:count`
    #[arg(long, global = true)]
    times: Option<String>,

    /// Number of velocity nodes
    #[arg(long, global = true)]
    grid_n: Option<usize>,

    /// Velocity cutoff
    #[arg(long, global = true)]
    grid_l: Option<f64>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Allow |xi| = sqrt(pi) in evolution runs
    #[arg(long, global = true)]
    experimental_resonance: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the discrete eigenvalue over a range of frequencies
    Dispersion,
    /// Evolve random initial data mode by mode and write snapshots
    Evolve {
        #[arg(long, value_parser = parse_method)]
        method: Option<Method>,
    },
    /// Check the Parseval identity and the expansion on random data
    Parseval,
    /// Decay toward the grossly determined solution
    Decay,
    /// Gap between the exact and the diffusive discrete mode
    ChapmanEnskog,
    /// Run the acceptance criteria
    Selftest {
        /// Subset of criteria, e.g. `1,6`
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "spectral" => Ok(Method::Spectral),
        "direct" => Ok(Method::Direct),
        "both" => Ok(Method::Both),
        other => Err(format!("unknown method `{other}` (spectral, direct, both)")),
    }
}

impl Cli {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        if let Some(f) = self.format {
            c.format = f;
        }
        if let Some(x) = &self.xi {
            c.xi = Sampling::parse(x)?;
        }
        if let Some(t) = &self.times {
            c.time = Sampling::parse(t)?;
        }
        if let Some(n) = self.grid_n {
            c.grid.points = n;
        }
        if let Some(l) = self.grid_l {
            c.grid.half_width = l;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Command::Evolve { method: Some(m) } = self.command {
            c.evolution.method = m;
        }
        c.experimental_resonance |= self.experimental_resonance;
        Ok(c)
    }
}

fn run(cli: &Cli) -> Result<()> {
    let config = cli.resolve()?;
    let mut sink = Sink::new(&config)?;
    match &cli.command {
        Command::Dispersion => commands::dispersion(&config, &mut sink),
        Command::Evolve { .. } => commands::evolve(&config, &mut sink),
        Command::Parseval => commands::parseval(&config, &mut sink),
        Command::Decay => commands::decay(&config, &mut sink),
        Command::ChapmanEnskog => commands::chapman_enskog(&config, &mut sink),
        Command::Selftest { criteria } => commands::selftest(&config, criteria, &mut sink),
    }?;
    log::info!("wrote {} files to {}", sink.written().len(), config.out.display());
    Ok(())
}

/// 0 success, 2 configuration, 3 resonance guard, 4 tolerance, 5 oracle
/// disagreement, 1 anything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    use bgk_spectral::Error as E;
    if let Some(c) = e.downcast_ref::<CliError>() {
        return match c {
            CliError::Config(_) => 2,
            CliError::Tolerance(_) => 4,
            CliError::Inconsistency(_) => 5,
        };
    }
    match e.downcast_ref::<E>() {
        Some(E::Resonance { .. } | E::Unresolved { .. }) => 3,
        Some(E::InvalidGrid(_) | E::InvalidArgument(_) | E::GridMismatch { .. }) => 2,
        Some(E::EssentialLine { .. } | E::ZeroFrequency | E::Pole { .. }) => 2,
        Some(E::StepRejected(_) | E::FitRejected(_)) => 4,
        Some(E::Bracket { .. }) => 5,
        None => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

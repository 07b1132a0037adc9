mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::Format;
use halfspec::Sign;
use std::path::PathBuf;
use std::process::ExitCode;

/// Half-eigenvalues, Fucik curves and resonant solves for the 1-D p-Laplacian.
#[derive(Debug, Parser)]
#[command(name = "halfspec", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, default_value = "halfspec.toml")]
    config: PathBuf,
    /// Output directory (default: `run.out`, then the current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Suppress the human-readable report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    /// Tolerance overrides, `key=value[,key=value...]`.
    #[arg(long, global = true)]
    tolerances: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Half-eigenvalue table for k = 0..=k_max.
    Spectrum {
        #[arg(long)]
        k: Option<usize>,
    },
    /// One Fucik curve sampled on the configured grid.
    Fucik {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
        branch: Option<Sign>,
    },
    /// Hypotheses, classification of lambda and the solvability verdict.
    Check {
        #[arg(long)]
        k: Option<usize>,
    },
    /// Full resonant solve: check, bracket, shoot.
    Solve {
        #[arg(long)]
        k: Option<usize>,
    },
    /// Linearized endpoint sensitivity and the boundary identity.
    Sensitivity {
        #[arg(long)]
        k: Option<usize>,
    },
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    s.parse()
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration; exit code 2.
    Config(String),
    /// Numerical failure or violated invariant; exit code 3.
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<halfspec::Error> for CliError {
    fn from(e: halfspec::Error) -> Self {
        use halfspec::Error::*;
        match e {
            Expr(_) | InvalidProblem(_) | InvalidTolerances(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HALFSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("HALFSPEC_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let cfg = config::load(&cli.config, &cli.tolerances)?;
    let out = output::Output::new(
        cli.out.or_else(|| cfg.run.out.clone()).unwrap_or_else(|| PathBuf::from(".")),
        cli.format.or(cfg.run.format).unwrap_or(Format::Both),
        cli.quiet,
    )?;
    match cli.command {
        Command::Spectrum { k } => commands::spectrum(&cfg, k, &out),
        Command::Fucik { k, branch } => commands::fucik(&cfg, k, branch, &out),
        Command::Check { k } => commands::check(&cfg, k, &out),
        Command::Solve { k } => commands::solve(&cfg, k, &out),
        Command::Sensitivity { k } => commands::sensitivity(&cfg, k, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("halfspec: {e}");
            ExitCode::from(e.code())
        }
    }
}

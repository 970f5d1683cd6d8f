//! Command-line experiments for the geophase library: S-control surfaces,
//! adiabatic-error sweeps, loop phases and conditional-gate reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use config::{Config, Overrides};
use error::CliError;
use record::RunRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "geophase",
    version,
    about = "Nonadiabatic geometric-phase gate experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jt_c and φ' over the (ω₁/J, δ/J) plane.
    SSurface(RunArgs),
    /// Jt_c and φ' along ω₁/J at fixed δ/J.
    Fig4(RunArgs),
    /// Cyclicity of the cone state with and without compensation, versus speed.
    AdiabaticError(RunArgs),
    /// Simulated conditional gate against the predicted phases.
    GateReport(RunArgs),
    /// Geometric phase of the compensated loop for several speed profiles.
    LoopPhase(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Reserved; every experiment is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub overrides: Overrides,
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::SSurface(a)
            | Command::Fig4(a)
            | Command::AdiabaticError(a)
            | Command::GateReport(a)
            | Command::LoopPhase(a) => a,
        }
    }
}

pub fn resolve_config(args: &RunArgs) -> Result<Config, CliError> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    args.overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

pub fn run_command(command: &Command) -> Result<RunRecord, CliError> {
    let cfg = resolve_config(command.args())?;
    match command {
        Command::SSurface(_) => experiments::run_s_surface(&cfg),
        Command::Fig4(_) => experiments::run_fig4(&cfg),
        Command::AdiabaticError(_) => experiments::run_adiabatic_error(&cfg),
        Command::GateReport(_) => experiments::run_gate_report(&cfg),
        Command::LoopPhase(_) => experiments::run_loop_phase(&cfg),
    }
}

/// Runs the command and writes its record; the elapsed time goes to stderr
/// so that output files stay reproducible.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let record = run_command(&cli.command)?;
    let args = cli.command.args();
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => record.write_csv(&mut buf)?,
        Format::Json => record.write_json(&mut buf)?,
    }
    match &args.out {
        Some(path) => std::fs::write(path, &buf)?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    eprintln!(
        "{}: {} rows in {:.3} s",
        record.experiment,
        record.rows.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

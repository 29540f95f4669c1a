use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spincharge::Execution;

mod commands;
mod config;
mod error;
mod output;
mod validate;

use commands::Tier;
use config::{check_scenario, load, Scenario};
use error::CliError;
use output::{Format, Report};

/// Collective spin-charger quantum battery simulator.
#[derive(Debug, Parser)]
#[command(name = "spincharge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON scenario configuration; defaults apply to omitted fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads for sweeps (machine parallelism when omitted).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `full` adds the thousand-cell scaling point.
    #[arg(long, global = true, value_enum, default_value = "ci")]
    tier: Tier,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Charging trace of one scenario.
    Simulate,
    /// Capacity and power over battery size, charger ratio and anisotropy.
    Landscape,
    /// Collective-vs-parallel ratio and its exponent.
    Scaling,
    /// Capacity and power against charger crosstalk.
    Crosstalk,
    /// Imperfectly prepared charger or battery.
    Nonideal,
    /// Cavity-charger reference.
    TcBenchmark,
    /// Closed-form and cross-representation checks.
    Validate,
}

impl Command {
    fn scenario(&self) -> Scenario {
        match self {
            Command::Simulate => Scenario::Simulate,
            Command::Landscape => Scenario::Landscape,
            Command::Scaling => Scenario::Scaling,
            Command::Crosstalk => Scenario::Crosstalk,
            Command::Nonideal => Scenario::Nonideal,
            Command::TcBenchmark => Scenario::TcBenchmark,
            Command::Validate => Scenario::Validate,
        }
    }
}

macro_rules! load_checked {
    ($ty:ty, $cli:expr) => {{
        let cfg: $ty = load($cli.common.config.as_deref())?;
        check_scenario(cfg.scenario, $cli.command.scenario())?;
        cfg
    }};
}

fn execute(cli: &Cli) -> Result<(Report, usize), CliError> {
    let exec = Execution::Parallel;
    let report = match cli.command {
        Command::Simulate => commands::simulate(load_checked!(config::SimulateConfig, cli), exec)?,
        Command::Landscape => commands::landscape_cmd(load_checked!(config::LandscapeConfig, cli), exec)?,
        Command::Scaling => commands::scaling(load_checked!(config::ScalingConfig, cli), cli.common.tier, exec)?,
        Command::Crosstalk => commands::crosstalk(load_checked!(config::CrosstalkConfig, cli), exec)?,
        Command::Nonideal => commands::nonideal_cmd(load_checked!(config::NonidealConfig, cli))?,
        Command::TcBenchmark => commands::tc_benchmark(load_checked!(config::TcConfig, cli), exec)?,
        Command::Validate => return validate::run(load_checked!(config::ValidateConfig, cli)),
    };
    Ok((report, 0))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Config("at `--threads`: must be at least 1".into()));
        }
        spincharge::set_thread_count(n);
    }
    let (report, failed) = execute(cli)?;
    let mut out: Box<dyn Write> = match &cli.common.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    report.write(cli.common.format, &mut out)?;
    out.flush()?;
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) | Err(CliError::Closed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spincharge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

mod commands;
mod config;
mod error;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{Experiment, ExperimentConfig, Preset};
use error::CliError;

/// Equilibria and optimal signals for an SIS epidemic with signal-driven protection.
#[derive(Parser)]
#[command(name = "persuade-sis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibrium at one susceptible-signal fidelity.
    Sne {
        #[arg(long)]
        mu_s: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Equilibria across a range of susceptible-signal fidelities.
    StaticSweep(Common),
    /// Integrate the epidemic and learning dynamics under a fixed schedule.
    Simulate(Common),
    /// Optimal piecewise-constant signal over a finite horizon.
    Optimize(Common),
    /// Optimal static signal against the optimal dynamic schedule.
    Compare(Common),
    /// Stationary infection levels over both signal fidelities.
    GridMui {
        /// Use a 0.02 grid step.
        #[arg(long)]
        coarse: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Report the analytic assumptions and signal thresholds.
    Check(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in parameter set.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Directory for CSV and JSON outputs.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    dump_config: bool,
    /// `section.key=value` assignments applied on top of the configuration.
    overrides: Vec<String>,
}

fn resolve(
    experiment: Experiment,
    common: &Common,
    extra: &[String],
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&common.config, common.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        (None, Some(preset)) => ExperimentConfig::preset(preset),
        (None, None) => ExperimentConfig::new(experiment),
    };
    cfg.experiment = experiment;
    let mut overrides = common.overrides.clone();
    overrides.extend_from_slice(extra);
    cfg.with_overrides(&overrides)
}

fn run(cli: Cli) -> Result<Option<commands::Summary>, CliError> {
    let (experiment, common, extra) = match cli.command {
        Command::Sne { mu_s, common } => (
            Experiment::Sne,
            common,
            mu_s.map(|m| vec![format!("sne.mu_s={m:?}")])
                .unwrap_or_default(),
        ),
        Command::StaticSweep(c) => (Experiment::StaticSweep, c, vec![]),
        Command::Simulate(c) => (Experiment::Simulate, c, vec![]),
        Command::Optimize(c) => (Experiment::Optimize, c, vec![]),
        Command::Compare(c) => (Experiment::Compare, c, vec![]),
        Command::GridMui { coarse, common } => (
            Experiment::GridMui,
            common,
            if coarse {
                vec!["grid.step=0.02".into()]
            } else {
                vec![]
            },
        ),
        Command::Check(c) => (Experiment::Check, c, vec![]),
    };
    let cfg = resolve(experiment, &common, &extra)?;
    if common.dump_config {
        print!("{}", cfg.to_toml()?);
        return Ok(None);
    }
    commands::execute(&cfg, &common.out).map(Some)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Some(summary)) => {
            println!(
                "{}",
                serde_json::to_string(&summary).expect("summary serializes")
            );
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
            );
            ExitCode::from(e.exit_code())
        }
    }
}

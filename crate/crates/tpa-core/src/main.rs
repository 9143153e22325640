use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tpa_core::scenario::{emit, execute, render, ConfigError, RawValue, ScenarioConfig, ScenarioError};

/// Two-photon absorption rates in the evanescent field of a nanofiber.
#[derive(Debug, Parser)]
#[command(name = "tpa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config file (dotted keys or tables).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout if omitted.
    #[arg(long, global = true)]
    output: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Override a config key, e.g. `--set fiber.diameter_nm=400`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Guided-mode summary of the signal wavelength (JSON only).
    Mode,
    /// Total rate for the configured scenario.
    Rate,
    /// Rate over `sweep.variable` from `sweep.lo_nm` to `sweep.hi_nm`.
    Sweep,
    /// Bandwidth maximizing the entangled rate.
    Optimize,
    /// The three built-in benchmark scenarios.
    Table1,
    /// Rate against photon separation.
    Coincidence,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Mode => "mode",
            Command::Rate => "rate",
            Command::Sweep => "sweep",
            Command::Optimize => "optimize",
            Command::Table1 => "table1",
            Command::Coincidence => "coincidence",
        }
    }
}

fn collect_pairs(cli: &Cli) -> Result<Vec<(String, RawValue)>, ConfigError> {
    let mut pairs = match &cli.config {
        Some(path) => ScenarioConfig::read_file(path)?,
        None => Vec::new(),
    };
    for s in &cli.set {
        pairs.push(ScenarioConfig::parse_override(s)?);
    }
    if let Some(f) = &cli.format {
        pairs.push(("output.format".into(), RawValue::Text(f.clone())));
    }
    if let Some(o) = &cli.output {
        pairs.push(("output.path".into(), RawValue::Text(o.clone())));
    }
    Ok(pairs)
}

fn run(cli: &Cli) -> Result<()> {
    let pairs = collect_pairs(cli).map_err(ScenarioError::from)?;
    let (cfg, payload) = execute(cli.command.name(), pairs, cli.jobs)?;
    let text = render(&cfg, &payload)?;
    emit(&text, &cfg.output_path).with_context(|| format!("{} output", payload.command()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<ScenarioError>().map(ScenarioError::exit_code).unwrap_or(3);
            ExitCode::from(code as u8)
        }
    }
}

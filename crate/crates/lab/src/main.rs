use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use uai_lab::{run_scenario, LabError, RunOptions, ScenarioConfig, SCENARIOS};

#[derive(Parser)]
#[command(name = "uai-lab", version, about = "Run exact universal-AI scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSVs and summary.
    Run {
        scenario: String,
        /// Scenario config; defaults to the shipped one.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        /// Enumeration cache directory (else UAI_LAB_CACHE).
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// List available scenarios.
    List,
    /// Validate a config file.
    Check { config: PathBuf },
}

fn load(scenario: &str, config: Option<&PathBuf>) -> Result<ScenarioConfig, LabError> {
    let cfg = match config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default_for(scenario)?,
    };
    if cfg.params.scenario() != scenario {
        return Err(LabError::Config(format!(
            "config is for `{}`, not `{scenario}`",
            cfg.params.scenario()
        )));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::List => {
            for s in SCENARIOS {
                let claims = uai_lab::claims::claims_for(s).join(", ");
                println!("{s}\t{claims}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { config } => match ScenarioConfig::load(&config) {
            Ok(cfg) => {
                println!("{}: valid {} config", config.display(), cfg.params.scenario());
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                eprintln!("error: {e}");
                Ok(ExitCode::from(e.exit_code() as u8))
            }
        },
        Command::Run { scenario, config, out, seed, jobs, cache } => {
            let cfg = match load(&scenario, config.as_ref()) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(e.exit_code() as u8));
                }
            };
            let opts = RunOptions { out: out.clone(), jobs, seed, cache };
            let outcome = match run_scenario(&cfg, &opts) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(e.exit_code() as u8));
                }
            };
            let summary = std::fs::read_to_string(out.join("summary.txt")).context("reading summary back")?;
            print!("{summary}");
            Ok(if outcome.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

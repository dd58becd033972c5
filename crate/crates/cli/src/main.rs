//! `noisy-qng run <config>` and `noisy-qng validate <config>`.

mod config;
mod error;
mod output;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Plan, RunConfig};
use error::CliError;
use output::{OutputDir, RunManifest, RunStatus};

#[derive(Parser)]
#[command(name = "noisy-qng", version, about = "Noisy variational circuit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker threads (default: available cores).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        workers: Option<u32>,
        /// Overrides `master_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config and list every violation without writing anything.
    Validate {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &Path, seed: Option<u64>) -> Result<(RunConfig, Plan), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
        path: path.display().to_string(),
        source,
    })?;
    let parsed = config::parse(&text);
    let mut violations = parsed.violations;
    let Some(mut cfg) = parsed.config else {
        return Err(CliError::Config(violations));
    };
    if seed.is_some() {
        cfg.master_seed = seed;
    }
    match config::plan(&cfg) {
        Ok(plan) if violations.is_empty() => Ok((cfg, plan)),
        Ok(_) => Err(CliError::Config(violations)),
        Err(more) => {
            violations.extend(more);
            Err(CliError::Config(violations))
        }
    }
}

fn validate(path: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let (cfg, _) = load(path, seed)?;
    let experiment = cfg.experiment.map(|e| e.label()).unwrap_or_default();
    println!("{}: valid {experiment} config", path.display());
    Ok(())
}

fn run(path: &Path, output_dir: Option<PathBuf>, workers: Option<u32>, seed: Option<u64>) -> Result<(), CliError> {
    let (mut cfg, plan) = load(path, seed)?;
    let dir = config::output_dir(&cfg, output_dir);
    cfg.output_dir = Some(dir.clone());
    let workers = workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: cfg.experiment.map(|e| e.label()).unwrap_or_default().to_string(),
        status: RunStatus::Running,
        started_at: output::timestamp(),
        finished_at: None,
        master_seed: cfg.master_seed.unwrap_or_default(),
        workers,
        config_path: path.display().to_string(),
        config: serde_json::to_value(&cfg)?,
        config_toml: toml::to_string(&cfg)?,
        files: Vec::new(),
        error: None,
    };
    let mut out = OutputDir::create(dir, manifest)?;
    let result = noisy_qng::par::with_workers(Some(workers), || run::execute(&plan, &mut out));
    match result {
        Ok(()) => out.finish(None),
        Err(e) => {
            out.finish(Some(e.to_string()))?;
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            output_dir,
            workers,
            seed,
        } => run(&config, output_dir, workers, seed),
        Command::Validate { config, seed } => validate(&config, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = e.record();
            match serde_json::to_string(&record) {
                Ok(line) => eprintln!("{line}"),
                Err(_) => eprintln!("{e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

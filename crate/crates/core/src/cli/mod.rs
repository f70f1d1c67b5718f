//! The `bt` command line: one subcommand per experiment, all outputs plus a
//! `manifest.json` written to `--out`.
//!
//! Exit codes: 0 on success, 2 for usage and validation errors, 1 for
//! runtime failures.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;

use crate::analysis::RunManifest;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "bt", version, about = "Learn bandit hyperparameters from offline tasks")]
pub struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "BT_WORKERS")]
    pub workers: Option<usize>,
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn UCB's exploration parameter from offline tasks.
    Tune(ExperimentConfig),
    /// Learn the exploration parameter together with prior arm means.
    TunePrior(ExperimentConfig),
    /// Learn GP-UCB's noise parameter on a grid function.
    TuneGp(ExperimentConfig),
    /// Estimate the expected number of pieces of the dual loss.
    Qd(ExperimentConfig),
    /// Mean regret of UCB as a function of alpha.
    RegretCurve(ExperimentConfig),
    /// Compare tuned UCB with corralling baselines on fresh tasks.
    Transfer(ExperimentConfig),
    /// Test regret of the tuned parameter against the number of training tasks.
    Generalize(ExperimentConfig),
    /// Regret lower-bound constant of a Gaussian instance.
    LowerBound(ExperimentConfig),
    /// Collect offline reward logs with a data-collection policy.
    Collect(ExperimentConfig),
    /// Offline tasks and pulls sufficient for a target accuracy.
    Budget(ExperimentConfig),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Tune(_) => "tune",
            Self::TunePrior(_) => "tune-prior",
            Self::TuneGp(_) => "tune-gp",
            Self::Qd(_) => "qd",
            Self::RegretCurve(_) => "regret-curve",
            Self::Transfer(_) => "transfer",
            Self::Generalize(_) => "generalize",
            Self::LowerBound(_) => "lower-bound",
            Self::Collect(_) => "collect",
            Self::Budget(_) => "budget",
        }
    }

    fn flags(&self) -> &ExperimentConfig {
        match self {
            Self::Tune(c)
            | Self::TunePrior(c)
            | Self::TuneGp(c)
            | Self::Qd(c)
            | Self::RegretCurve(c)
            | Self::Transfer(c)
            | Self::Generalize(c)
            | Self::LowerBound(c)
            | Self::Collect(c)
            | Self::Budget(c) => c,
        }
    }
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::Parse { .. } | Error::Unsupported(_) => 2,
        Error::AtParameter { source, .. } => exit_code(source),
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command and returns the paths written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let file = match &cli.config {
        Some(path) => ExperimentConfig::from_toml_file(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = file.overlay(cli.command.flags());
    cfg.check_files()?;
    let seed = cfg.seed()?;
    let out = cfg.out_dir();
    let work = || commands::dispatch(&cli.command, &cfg, seed);
    let outputs = match cli.workers {
        Some(0) => return Err(Error::Config("workers: must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Resource(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    std::fs::create_dir_all(&out)?;
    let mut written = Vec::with_capacity(outputs.len() + 1);
    for (name, bytes) in &outputs {
        let path = out.join(name);
        std::fs::write(&path, bytes)?;
        written.push(path);
    }
    let names = outputs.iter().map(|(n, _)| n.clone()).collect();
    RunManifest::new(cli.command.name(), seed, serde_json::to_value(&cfg)?, names).write(&out)?;
    written.push(out.join("manifest.json"));
    Ok(written)
}

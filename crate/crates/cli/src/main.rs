//! `pauserl`: experiments, bound sweeps and verification suites.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{RunConfig, SEED_KEY};
use output::Output;

#[derive(Parser)]
#[command(name = "pauserl", version, about = "Forecasting online RL experiments and regret-bound tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config. Defaults to 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "PAUSERL_OUT", default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Goal-switching cliffworld with reactive or forecasting Q-learning.
    RunCliffworld {
        /// reactive, forecast or both.
        #[arg(long)]
        method: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        step_reward: Option<f64>,
    },
    /// Preference-weight policies on the switching bandit.
    RunBandit,
    /// The forecasting online RL loop over one or more update schedules.
    RunSchedule,
    /// Update/hold split sweeps and solver reports.
    Bounds,
    /// Randomized bound-domination suites.
    Verify,
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    ChecksFailed,
}

fn run(cli: Cli) -> Result<Status> {
    let mut cfg = config::load(cli.common.config.as_deref())?;
    if let Command::RunCliffworld { method, step_reward } = &cli.command {
        if let Some(m) = method {
            cfg.set("run.method", m.clone());
        }
        if let Some(r) = step_reward {
            cfg.set("cliff.step_reward", pauserl::fmt_f64(*r));
        }
    }
    if let Some(s) = cli.common.seed {
        cfg.set(SEED_KEY, s.to_string());
    }
    let seed: u64 = cfg.get(SEED_KEY, 0)?;

    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(cli.common.workers).build().context("building worker pool")?;
    let dir = cli.common.out;
    let open = |cfg: &RunConfig| -> Result<Output> {
        cfg.reject_unknown()?;
        Output::new(&dir, seed, cfg.hash())
    };
    pool.install(|| match cli.command {
        Command::RunCliffworld { .. } => commands::cliff::run(&cfg, seed, open),
        Command::RunBandit => commands::bandit::run(&cfg, open),
        Command::RunSchedule => commands::schedule::run(&cfg, seed, open),
        Command::Bounds => commands::bounds::run(&cfg, open),
        Command::Verify => commands::verify::run(&cfg, seed, open),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

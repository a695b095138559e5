use anyhow::{bail, Result};
use rayon::prelude::*;

use pauserl::environments::CliffworldSpec;
use pauserl::experiments::{
    cliff_csv_rows, recovery_summary, run_cliffworld, CliffMethod, CliffRunConfig, ALPHA_EPSILON_GRID,
    CLIFF_CSV_HEADER, FORECAST_SNAPSHOT_EVERY, FORECAST_WINDOW,
};
use pauserl::seeding::run_rng;

use super::{parse_basis, parse_tuple};
use crate::config::RunConfig;
use crate::output::Output;
use crate::Status;

/// Length of the pre- and post-switch averaging windows in the summary.
const SUMMARY_WINDOW: usize = 4000;

struct Job {
    cfg: CliffRunConfig,
    grid_index: usize,
    seed: u64,
}

/// Runs every `(α, ε)` pair for `run.seeds` seeds starting at the master
/// seed. Seed `s` of grid entry `k` draws from stream `k` of seed `s`.
pub fn run(cfg: &RunConfig, seed: u64, open: impl Fn(&RunConfig) -> Result<Output>) -> Result<Status> {
    let d = CliffworldSpec::default();
    let spec = CliffworldSpec {
        success_reward: cfg.get("cliff.success_reward", d.success_reward)?,
        failure_reward: cfg.get("cliff.failure_reward", d.failure_reward)?,
        step_reward: cfg.get("cliff.step_reward", d.step_reward)?,
        switch_step: cfg.get("cliff.switch_step", d.switch_step)?,
        total_steps: cfg.get("cliff.total_steps", d.total_steps)?,
        max_episode_steps: cfg.get("cliff.max_episode_steps", d.max_episode_steps)?,
        discount: cfg.get("cliff.discount", d.discount)?,
    };
    let methods = match cfg.get("run.method", "both".to_string())?.as_str() {
        "both" => vec![CliffMethod::Reactive, CliffMethod::Forecast],
        m => vec![CliffMethod::parse(m)?],
    };
    let seeds: u64 = cfg.get("run.seeds", 5)?;
    if seeds == 0 {
        bail!("run.seeds must be positive");
    }
    let default_grid = ALPHA_EPSILON_GRID.iter().map(|(a, e)| format!("{a}:{e}")).collect();
    let grid = cfg
        .list::<String>("learner.grid", default_grid)?
        .iter()
        .map(|s| parse_tuple::<f64>(s, 2).map(|v| (v[0], v[1])))
        .collect::<Result<Vec<_>>>()?;
    let snapshot_every = cfg.get("forecast.snapshot_every", FORECAST_SNAPSHOT_EVERY)?;
    let window = cfg.get("forecast.window", FORECAST_WINDOW)?;
    let basis = parse_basis(&cfg.get("forecast.basis", "identity".to_string())?)?;
    let out = open(cfg)?;

    let mut jobs = Vec::new();
    for (k, &(alpha, epsilon)) in grid.iter().enumerate() {
        for s in 0..seeds {
            for &method in &methods {
                let cfg = CliffRunConfig {
                    snapshot_every,
                    window,
                    basis,
                    ..CliffRunConfig::new(spec, method, alpha, epsilon)
                };
                jobs.push(Job { cfg, grid_index: k, seed: seed.wrapping_add(s) });
            }
        }
    }
    let runs = jobs
        .par_iter()
        .map(|j| run_cliffworld(&j.cfg, &mut run_rng(j.seed, j.grid_index as u64)))
        .collect::<pauserl::Result<Vec<_>>>()?;

    let rows: String = jobs
        .iter()
        .zip(&runs)
        .map(|(j, r)| cliff_csv_rows(r, j.cfg.method, j.cfg.alpha, j.cfg.epsilon, j.seed))
        .collect();
    let path = out.csv("cliffworld.csv", CLIFF_CSV_HEADER, &rows)?;
    println!("wrote {} ({} runs)", path.display(), runs.len());

    let pick = |m: CliffMethod| -> Vec<Vec<f64>> {
        jobs.iter().zip(&runs).filter(|(j, _)| j.cfg.method == m).map(|(_, r)| r.clone()).collect()
    };
    let (switch, total) = (spec.switch_step, spec.total_steps);
    if methods.len() == 2 && switch >= SUMMARY_WINDOW && total >= switch + SUMMARY_WINDOW {
        let s = recovery_summary(
            &pick(CliffMethod::Forecast),
            &pick(CliffMethod::Reactive),
            switch - SUMMARY_WINDOW..switch,
            total - SUMMARY_WINDOW..total,
        )?;
        println!(
            "mean reward per step  pre-switch: forecast {:.4} reactive {:.4}  final: forecast {:.4} reactive {:.4}",
            s.forecast_pre, s.reactive_pre, s.forecast_post, s.reactive_post
        );
        println!("forecast recovers relative to reactive: {}", s.recovers());
    }
    Ok(Status::Ok)
}

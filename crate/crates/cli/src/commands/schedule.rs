use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use pauserl::bounds::{constants_from, interval_budgets, total_regret_bound};
use pauserl::environments::{DriftEvent, DriftMdpSpec, DriftTarget};
use pauserl::fmt_f64;
use pauserl::learner::{NpgConfig, QLearnConfig};
use pauserl::mdp::{read_timeline, TimeVaryingMdp};
use pauserl::scheduler::{
    decompose_regret, dynamic_regret, run_forl, schedule_from_blocks, ForecastConfig, ForlConfig, QSource,
    SchedulePolicyParams, UpdateSchedule,
};
use pauserl::seeding::run_rng;

use super::{parse_basis, parse_tuple};
use crate::config::RunConfig;
use crate::output::Output;
use crate::Status;

const BOUNDS_HEADER: &str =
    "run,m,t_m,G_m,N_m,measured_update,measured_hold,bound_r_pi,bound_r_f,bound_r_env,bound_total";

/// `<time>:<magnitude>:<rewards|transitions|both>`
fn parse_event(s: &str) -> Result<DriftEvent> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [time, magnitude, target] = parts[..] else { bail!("expected <time>:<magnitude>:<target> in {s:?}") };
    let target = match target {
        "rewards" => DriftTarget::Rewards,
        "transitions" => DriftTarget::Transitions,
        "both" => DriftTarget::Both,
        _ => bail!("unknown drift target {target:?}"),
    };
    Ok(DriftEvent { time: time.parse()?, magnitude: magnitude.parse()?, target })
}

/// A timeline file when `env.timeline` is set, otherwise a seeded drift MDP.
fn environment(cfg: &RunConfig, seed: u64) -> Result<TimeVaryingMdp> {
    let drift_keys = ["env.states", "env.actions", "env.horizon", "env.discount", "env.total_time", "env.drift"];
    if let Some(path) = cfg.raw("env.timeline") {
        if let Some(k) = drift_keys.iter().find(|k| cfg.raw(k).is_some()) {
            bail!("{k} cannot be combined with env.timeline");
        }
        let text = std::fs::read_to_string(path).with_context(|| format!("reading timeline {path}"))?;
        return Ok(read_timeline(&text)?);
    }
    let total_time = cfg.get("env.total_time", 100)?;
    let plan = match cfg.raw("env.drift") {
        None => vec![
            DriftEvent { time: total_time / 3, magnitude: 0.3, target: DriftTarget::Rewards },
            DriftEvent { time: 2 * total_time / 3, magnitude: 0.2, target: DriftTarget::Both },
        ],
        Some("") | Some("none") => Vec::new(),
        Some(list) => list.split(',').map(parse_event).collect::<Result<_>>()?,
    };
    let spec = DriftMdpSpec {
        num_states: cfg.get("env.states", 3)?,
        num_actions: cfg.get("env.actions", 2)?,
        horizon: cfg.get("env.horizon", 3)?,
        discount: cfg.get("env.discount", 0.9)?,
        total_time,
        seed: cfg.get("env.seed", seed)?,
        plan,
    };
    Ok(spec.build()?)
}

/// Explicit `t:G:N` triples when given, otherwise one block schedule per `γ_f`.
fn schedules(cfg: &RunConfig, total_time: usize) -> Result<Vec<(String, UpdateSchedule)>> {
    if let Some(list) = cfg.raw("schedule.triples") {
        for k in ["schedule.block_len", "schedule.gamma_f"] {
            if cfg.raw(k).is_some() {
                bail!("{k} cannot be combined with schedule.triples");
            }
        }
        let triples = list
            .split(',')
            .map(|s| parse_tuple::<usize>(s, 3).map(|v| (v[0], v[1], v[2])))
            .collect::<Result<Vec<_>>>()?;
        return Ok(vec![("explicit".into(), UpdateSchedule::from_triples(&triples))]);
    }
    let block_len = cfg.get("schedule.block_len", 10)?;
    let default_grid = (1..=10).map(|i| i as f64 / 10.0).collect();
    cfg.list("schedule.gamma_f", default_grid)?
        .into_iter()
        .map(|update_fraction| {
            let s = schedule_from_blocks(&SchedulePolicyParams { block_len, update_fraction }, total_time)?;
            Ok((format!("gf{}", fmt_f64(update_fraction)), s))
        })
        .collect()
}

struct RunResult {
    label: String,
    trace_csv: String,
    summary_csv: String,
    bound_rows: String,
    measured: f64,
    bound: f64,
}

pub fn run(cfg: &RunConfig, seed: u64, open: impl Fn(&RunConfig) -> Result<Output>) -> Result<Status> {
    let mdp = environment(cfg, seed)?;
    let runs = schedules(cfg, mdp.total_time())?;
    let gamma = mdp.discount();
    let tau = cfg.get("npg.tau", 0.1)?;
    let npg = NpgConfig { eta: cfg.get("npg.eta", 0.5 * (1.0 - gamma) / tau)?, tau, gamma };
    let forecast = ForecastConfig {
        basis: parse_basis(&cfg.get("forecast.basis", "identity".to_string())?)?,
        window: cfg.get("forecast.window", 3)?,
    };
    let source = match cfg.get("learner.source", "oracle".to_string())?.as_str() {
        "oracle" => QSource::Oracle,
        "empirical" => QSource::Empirical(QLearnConfig {
            alpha: cfg.get("learner.alpha", 0.1)?,
            epsilon: cfg.get("learner.epsilon", 0.1)?,
            gamma,
        }),
        s => bail!("unknown learner.source {s:?}, expected oracle or empirical"),
    };
    let forl = ForlConfig { forecast, npg, source, record_policies: false };
    let out = open(cfg)?;

    let results = runs
        .par_iter()
        .enumerate()
        .map(|(i, (label, schedule))| -> Result<RunResult> {
            let trace = run_forl(&mdp, schedule, &forl, &mut run_rng(seed, i as u64 + 1))?;
            let parts = decompose_regret(&trace, schedule)?;
            let constants = trace
                .intervals
                .iter()
                .map(|iv| constants_from(&mdp, iv.t, &iv.start_policy, npg.eta, npg.tau))
                .collect::<pauserl::Result<Vec<_>>>()?;
            let deltas: Vec<f64> = trace.intervals.iter().map(|iv| iv.delta_f).collect();
            let budgets = interval_budgets(&mdp, schedule)?;
            let (bound, bound_parts) = total_regret_bound(&constants, schedule, &deltas, &budgets)?;
            let bound_rows = trace
                .intervals
                .iter()
                .zip(&parts)
                .zip(&bound_parts)
                .map(|((iv, p), b)| {
                    format!(
                        "{label},{},{},{},{},{},{},{},{},{},{}\n",
                        iv.m + 1,
                        iv.t,
                        iv.g,
                        iv.n,
                        fmt_f64(p.update_regret),
                        fmt_f64(p.hold_regret),
                        fmt_f64(b.r_pi),
                        fmt_f64(b.r_f),
                        fmt_f64(b.r_env),
                        fmt_f64(b.total())
                    )
                })
                .collect();
            Ok(RunResult {
                label: label.clone(),
                trace_csv: trace.to_csv(),
                summary_csv: trace.summary_csv(&parts),
                bound_rows,
                measured: dynamic_regret(&trace),
                bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bound_rows = String::new();
    let mut totals = String::new();
    for r in &results {
        out.csv_with_header(&format!("trace_{}.csv", r.label), &r.trace_csv)?;
        out.csv_with_header(&format!("intervals_{}.csv", r.label), &r.summary_csv)?;
        bound_rows.push_str(&r.bound_rows);
        totals.push_str(&format!("{},{},{}\n", r.label, fmt_f64(r.measured), fmt_f64(r.bound)));
        println!("{}: dynamic regret {:.6}, upper bound {:.6}", r.label, r.measured, r.bound);
    }
    out.csv("bounds_vs_measured.csv", BOUNDS_HEADER, &bound_rows)?;
    out.csv("regret_totals.csv", "run,measured_regret,bound", &totals)?;
    Ok(Status::Ok)
}

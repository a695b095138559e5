use anyhow::{bail, Result};

use pauserl::environments::SwitchBanditSpec;
use pauserl::experiments::{run_bandit, BetaSchedule};
use pauserl::fmt_f64;

use super::parse_tuple;
use crate::config::RunConfig;
use crate::output::Output;
use crate::Status;

/// `conservative`, `pessimistic`, `constant:<β>`, `tempo:<from>:<to>:<power>`
/// or `steps:<t>=<β>/<t>=<β>/..`.
fn parse_schedule(s: &str) -> Result<BetaSchedule> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    Ok(match kind {
        "conservative" if rest.is_empty() => BetaSchedule::conservative(),
        "pessimistic" if rest.is_empty() => BetaSchedule::pessimistic(),
        "constant" => BetaSchedule::Constant(parse_tuple(rest, 1)?[0]),
        "tempo" => {
            let v: Vec<f64> = parse_tuple(rest, 3)?;
            BetaSchedule::Tempo { from: v[0], to: v[1], power: v[2] }
        }
        "steps" => BetaSchedule::Steps(
            rest.split('/')
                .map(|step| match step.split_once('=') {
                    Some((t, b)) => Ok((t.trim().parse()?, b.trim().parse()?)),
                    None => bail!("expected <t>=<beta> in {step:?}"),
                })
                .collect::<Result<_>>()?,
        ),
        _ => bail!("unknown beta schedule {s:?}"),
    })
}

pub fn run(cfg: &RunConfig, open: impl Fn(&RunConfig) -> Result<Output>) -> Result<Status> {
    let total_time: usize = cfg.get("bandit.total_time", 100)?;
    let spec = SwitchBanditSpec { total_time, switch_time: cfg.get("bandit.switch_time", total_time / 2)? };
    let names = cfg.list("bandit.schedules", vec!["conservative".to_string(), "pessimistic".to_string()])?;
    let schedules = names.iter().map(|n| parse_schedule(n)).collect::<Result<Vec<_>>>()?;
    let out = open(cfg)?;

    let mut summary = String::new();
    for (i, (name, schedule)) in names.iter().zip(&schedules).enumerate() {
        let steps = run_bandit(&spec, schedule)?;
        let rows: String =
            steps.iter().map(|s| format!("{},{},{}\n", s.t, fmt_f64(s.beta), fmt_f64(s.reward))).collect();
        let kind = name.split(':').next().unwrap_or("schedule");
        out.csv(&format!("bandit_{i}_{kind}.csv"), "t,beta,reward", &rows)?;
        let total: f64 = steps.iter().map(|s| s.reward).sum();
        summary.push_str(&format!("{name},{}\n", fmt_f64(total)));
        println!("{name}: cumulative reward {total:.6}");
    }
    out.csv("bandit_summary.csv", "schedule,cumulative_reward", &summary)?;
    Ok(Status::Ok)
}

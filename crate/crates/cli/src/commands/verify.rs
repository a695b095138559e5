use anyhow::{anyhow, Result};
use rayon::prelude::*;

use pauserl::verify::{forecast_suite, gap_suite, regret_suite, SuiteConfig, SuiteReport, REPORT_CSV_HEADER};

use crate::config::RunConfig;
use crate::output::Output;
use crate::Status;

#[derive(Clone, Copy, PartialEq)]
enum Suite {
    Gaps,
    Forecast,
    Regret,
}

pub fn run(cfg: &RunConfig, seed: u64, open: impl Fn(&RunConfig) -> Result<Output>) -> Result<Status> {
    let names = cfg.list("verify.suites", vec!["gaps".to_string(), "forecast".into(), "regret".into()])?;
    let suites = names
        .iter()
        .map(|n| match n.as_str() {
            "gaps" => Ok(Suite::Gaps),
            "forecast" => Ok(Suite::Forecast),
            "regret" => Ok(Suite::Regret),
            _ => Err(anyhow!("unknown suite {n:?}, expected gaps, forecast or regret")),
        })
        .collect::<Result<Vec<_>>>()?;
    let base = SuiteConfig {
        bound_scale: cfg.get("verify.bound_scale", 1.0)?,
        slack: cfg.get("verify.slack", 1e-9)?,
        ..SuiteConfig::new(0, seed)
    };
    let gap_n = cfg.get("verify.gap_instances", 200)?;
    let forecast_n = cfg.get("verify.forecast_instances", 100)?;
    let regret_n = cfg.get("verify.regret_instances", 20)?;
    let weight_cap = cfg.get("verify.weight_cap", 10.0)?;
    let out = open(cfg)?;

    let reports = suites
        .par_iter()
        .map(|s| match s {
            Suite::Gaps => gap_suite(&SuiteConfig { instances: gap_n, ..base }),
            Suite::Forecast => forecast_suite(&SuiteConfig { instances: forecast_n, ..base }, weight_cap),
            Suite::Regret => regret_suite(&SuiteConfig { instances: regret_n, ..base }),
        })
        .collect::<pauserl::Result<Vec<SuiteReport>>>()?;

    let rows: String = reports.iter().map(SuiteReport::csv_rows).collect();
    out.csv("verify_report.csv", REPORT_CSV_HEADER, &rows)?;
    for r in &reports {
        println!("{}", r.summary());
    }
    if reports.iter().all(SuiteReport::passed) {
        Ok(Status::Ok)
    } else {
        println!("verification failed");
        Ok(Status::ChecksFailed)
    }
}

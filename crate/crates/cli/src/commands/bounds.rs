use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use rayon::prelude::*;

use pauserl::bounds::{
    split_report, standard_sweeps, sweep, SplitProblem, SweepParam, SweepSpec, SOLVER_CSV_HEADER, SWEEP_CSV_HEADER,
};

use crate::config::RunConfig;
use crate::output::Output;
use crate::Status;

/// `split.*` keys override the matching baseline fields of every sweep.
fn override_baseline(cfg: &RunConfig, b: &SplitProblem) -> Result<SplitProblem> {
    Ok(SplitProblem {
        delta: cfg.get("split.delta", b.delta)?,
        alpha1: cfg.get("split.alpha1", b.alpha1)?,
        alpha2: cfg.get("split.alpha2", b.alpha2)?,
        b1max: cfg.get("split.b1max", b.b1max)?,
        b2max: cfg.get("split.b2max", b.b2max)?,
        c1: cfg.get("split.c1", b.c1)?,
        c4_plus_c5: cfg.get("split.c4_plus_c5", b.c4_plus_c5)?,
        eta: cfg.get("split.eta", b.eta)?,
        tau: cfg.get("split.tau", b.tau)?,
    })
}

fn sweep_specs(cfg: &RunConfig) -> Result<Vec<SweepSpec>> {
    let all: Vec<String> = SweepParam::ALL.iter().map(|p| p.name().to_string()).collect();
    let wanted = cfg
        .list("bounds.sweeps", all)?
        .iter()
        .map(|n| SweepParam::from_name(n).ok_or_else(|| anyhow!("unknown sweep {n:?}")))
        .collect::<Result<Vec<_>>>()?;
    let mut specs = Vec::new();
    for spec in standard_sweeps() {
        // Keys are read for every sweep so that none is reported as unknown.
        let values = cfg.list(&format!("grid.{}", spec.param.name()), spec.values.clone())?;
        let baseline = override_baseline(cfg, &spec.baseline)?;
        if wanted.contains(&spec.param) {
            specs.push(SweepSpec { values, baseline, ..spec });
        }
    }
    Ok(specs)
}

fn metadata(specs: &[SweepSpec]) -> String {
    let mut out = String::from(
        "Sweep baselines. Solver CSV rows follow the grid order.\n\
         dominant_ratio: C1 is rescaled so that the envelope makes up the given share of\n\
         envelope + policy term at the symmetric split; the value 0 sets C4 + C5 = 0 and C1 = 1.\n\n",
    );
    for s in specs {
        let _ = writeln!(out, "{} ({:?}): values {:?}", s.param.name(), s.objective, s.values);
        let _ = writeln!(out, "  baseline {:?}", s.baseline);
    }
    out
}

pub fn run(cfg: &RunConfig, open: impl Fn(&RunConfig) -> Result<Output>) -> Result<Status> {
    let specs = sweep_specs(cfg)?;
    let out = open(cfg)?;
    let results = specs
        .par_iter()
        .map(|spec| -> Result<_> {
            let table = sweep(spec)?;
            let solver: String = table
                .points
                .iter()
                .map(|pt| split_report(spec.objective, &pt.problem).map(|r| r.csv_row() + "\n"))
                .collect::<pauserl::Result<_>>()?;
            Ok((table, solver))
        })
        .collect::<Result<Vec<_>>>()?;
    for (table, solver) in &results {
        let name = table.param.name();
        out.csv(&format!("sweep_{name}.csv"), SWEEP_CSV_HEADER, &table.csv_rows())?;
        out.csv(&format!("solver_{name}.csv"), SOLVER_CSV_HEADER, solver)?;
        println!("{name}: N* = {:?}", table.n_stars());
    }
    out.text("bounds_metadata.txt", &metadata(&specs))?;
    Ok(Status::Ok)
}

use std::fmt::Write as _;

use super::schedule::{Phase, UpdateSchedule};
use crate::mdp::{QTable, TabularPolicy};
use crate::{fmt_f64, Error, Result};

/// Values at one tick, averaged over the initial distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct TickRecord {
    pub t: usize,
    /// 0-based interval index.
    pub m: usize,
    pub phase: Phase,
    pub v_star: f64,
    pub v_pi: f64,
    /// Undiscounted return of the episode rolled out at this tick.
    pub episode_return: f64,
}

impl TickRecord {
    pub fn regret(&self) -> f64 {
        self.v_star - self.v_pi
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalRecord {
    pub m: usize,
    pub t: usize,
    pub g: usize,
    pub n: usize,
    /// Policy executed at `t_m`, before any update of this interval.
    pub start_policy: TabularPolicy,
    /// `Q̃_{t_{m+1}|t_m}`
    pub forecast: QTable,
    /// `||Q̃_{t_{m+1}|t_m} - Q*_{t_{m+1}}||_∞`
    pub delta_f: f64,
    /// Combination weights of the forecast over its snapshots.
    pub combination_weights: Vec<f64>,
    pub snapshot_times: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretTrace {
    pub ticks: Vec<TickRecord>,
    pub intervals: Vec<IntervalRecord>,
    /// Executed policy at every tick, when requested.
    pub policies: Option<Vec<TabularPolicy>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalRegret {
    pub m: usize,
    pub update_regret: f64,
    pub hold_regret: f64,
}

impl RegretTrace {
    /// `t,m,phase,v_star,v_pi,inst_regret`; `m` is 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,m,phase,v_star,v_pi,inst_regret\n");
        for r in &self.ticks {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.t,
                r.m + 1,
                r.phase.as_str(),
                fmt_f64(r.v_star),
                fmt_f64(r.v_pi),
                fmt_f64(r.regret())
            );
        }
        out
    }

    /// `m,t_m,G_m,N_m,update_regret,hold_regret,delta_f_measured`; `m` is 1-based.
    pub fn summary_csv(&self, parts: &[IntervalRegret]) -> String {
        let mut out = String::from("m,t_m,G_m,N_m,update_regret,hold_regret,delta_f_measured\n");
        for (iv, p) in self.intervals.iter().zip(parts) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                iv.m + 1,
                iv.t,
                iv.g,
                iv.n,
                fmt_f64(p.update_regret),
                fmt_f64(p.hold_regret),
                fmt_f64(iv.delta_f)
            );
        }
        out
    }
}

/// `Σ_t (V*_t - V^{π_t}_t)` over the recorded ticks.
pub fn dynamic_regret(trace: &RegretTrace) -> f64 {
    trace.ticks.iter().map(TickRecord::regret).sum()
}

/// Per-interval sums of the regret over the update and hold ticks.
pub fn decompose_regret(trace: &RegretTrace, schedule: &UpdateSchedule) -> Result<Vec<IntervalRegret>> {
    if trace.ticks.len() != schedule.end() {
        return Err(Error::arg(format!("trace has {} ticks, schedule covers {}", trace.ticks.len(), schedule.end())));
    }
    let mut parts: Vec<IntervalRegret> =
        (0..schedule.entries.len()).map(|m| IntervalRegret { m, update_regret: 0.0, hold_regret: 0.0 }).collect();
    for (t, r) in trace.ticks.iter().enumerate() {
        if r.t != t || schedule.locate(t) != Some((r.m, r.phase)) {
            return Err(Error::arg(format!("tick {t} does not match the schedule")));
        }
        let p = &mut parts[r.m];
        match r.phase {
            Phase::Update => p.update_regret += r.regret(),
            Phase::Hold => p.hold_regret += r.regret(),
        }
    }
    Ok(parts)
}

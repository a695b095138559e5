//! Randomised bound-domination suites.
//!
//! Every suite draws its instances from `run_rng(seed, i)` for `i = 0, 1, ..`
//! and records one [`CheckRecord`] per measured quantity. A check fails when
//! the measurement exceeds `bound_scale * bound + slack`; `bound_scale` exists
//! so that the harness itself can be tested against deliberately tightened
//! bounds.

use std::fmt::Write as _;

use rand::Rng;

use crate::bounds::{
    constants_from, interval_budgets, optimal_q_gap_bound, optimal_v_gap_bound, same_policy_v_gap_bound,
    total_regret_bound,
};
use crate::environments::{make_drift_mdp, random_simplex, DriftEvent, DriftMdpSpec, DriftTarget};
use crate::forecast::{
    combination_weights, compute_u, fit_forecaster, forecast_error_bound, forecast_q, Basis, ForecastErrorInputs,
};
use crate::learner::NpgConfig;
use crate::mdp::{
    exact_evaluate, optimal_q_by_step, optimal_values, span_local_budget, MdpTables, QTable, Segment, TabularPolicy,
    TimeVaryingMdp,
};
use crate::scheduler::{
    dynamic_regret, run_forl, schedule_from_blocks, ForecastConfig, ForlConfig, QSource, SchedulePolicyParams,
};
use crate::seeding::{run_rng, RunRng};
use crate::{fmt_f64, Error, Result};

pub const REPORT_CSV_HEADER: &str = "suite,instance,check,measured,bound,margin,passed";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub instances: usize,
    pub seed: u64,
    pub bound_scale: f64,
    pub slack: f64,
}

impl SuiteConfig {
    pub fn new(instances: usize, seed: u64) -> Self {
        SuiteConfig { instances, seed, bound_scale: 1.0, slack: 1e-9 }
    }

    fn validate(&self) -> Result<()> {
        if self.instances == 0 {
            return Err(Error::arg("at least one instance is required"));
        }
        if !(self.bound_scale > 0.0 && self.slack >= 0.0) {
            return Err(Error::arg("bound scale must be positive and slack nonnegative"));
        }
        Ok(())
    }

    fn check(&self, instance: usize, name: String, measured: f64, bound: f64) -> CheckRecord {
        let scaled = self.bound_scale * bound;
        CheckRecord { instance, check: name, measured, bound: scaled, passed: measured <= scaled + self.slack }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    /// Stream index of the instance under the suite seed.
    pub instance: usize,
    pub check: String,
    pub measured: f64,
    /// Bound after scaling.
    pub bound: f64,
    pub passed: bool,
}

impl CheckRecord {
    pub fn margin(&self) -> f64 {
        self.bound - self.measured
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub instances: usize,
    /// Draws rejected before `instances` usable ones were found.
    pub skipped: usize,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn violations(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn min_margin(&self) -> f64 {
        self.checks.iter().map(CheckRecord::margin).fold(f64::INFINITY, f64::min)
    }

    /// Rows `suite,instance,check,measured,bound,margin,passed` without a header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.suite,
                c.instance,
                c.check,
                fmt_f64(c.measured),
                fmt_f64(c.bound),
                fmt_f64(c.margin()),
                c.passed
            );
        }
        out
    }

    /// One line per suite plus one per violation.
    pub fn summary(&self) -> String {
        let bad: Vec<&CheckRecord> = self.violations().collect();
        let mut out = format!(
            "{}: {} instances, {} checks, {} violations, min margin {:.3e}",
            self.suite,
            self.instances,
            self.checks.len(),
            bad.len(),
            self.min_margin()
        );
        for c in bad {
            let _ = write!(
                out,
                "\n  violation: seed={} instance={} check={} measured={} bound={}",
                self.seed,
                c.instance,
                c.check,
                fmt_f64(c.measured),
                fmt_f64(c.bound)
            );
        }
        out
    }
}

fn random_tables(rng: &mut RunRng, ns: usize, na: usize, reward_scale: f64) -> Result<MdpTables> {
    let rewards = (0..ns * na).map(|_| rng.random_range(-reward_scale..=reward_scale)).collect();
    let transitions = (0..ns * na).flat_map(|_| random_simplex(ns, rng)).collect();
    MdpTables::new(ns, na, rewards, transitions)
}

fn random_policy(rng: &mut RunRng, ns: usize, na: usize) -> Result<TabularPolicy> {
    let probs = (0..ns).flat_map(|_| random_simplex(na, rng)).collect();
    TabularPolicy::from_weights_floored(ns, na, probs)
}

/// Two frozen MDPs at ticks 0 and 1, the second a random perturbation of the
/// first (identical in about a quarter of the draws).
fn random_pair(rng: &mut RunRng) -> Result<TimeVaryingMdp> {
    let ns = rng.random_range(1..=4);
    let na = rng.random_range(1..=3);
    let horizon = rng.random_range(1..=4);
    let gamma = if rng.random_bool(0.5) { 0.5 } else { 0.9 };
    let scale = rng.random_range(0.5..=3.0);
    let a = random_tables(rng, ns, na, scale)?;
    let b = if rng.random_bool(0.25) {
        a.clone()
    } else {
        let m_r = rng.random_range(0.0..=1.0) * scale;
        let m_p = rng.random_range(0.0..=1.0);
        let rewards = a.rewards().iter().map(|r| r + rng.random_range(-m_r..=m_r)).collect();
        let mut transitions = a.transitions().to_vec();
        for row in transitions.chunks_mut(ns) {
            let q = random_simplex(ns, rng);
            row.iter_mut().zip(&q).for_each(|(p, q)| *p = (1.0 - m_p) * *p + m_p * q);
            let z: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= z);
        }
        MdpTables::new(ns, na, rewards, transitions)?
    };
    TimeVaryingMdp::new(
        horizon,
        gamma,
        1,
        vec![1.0 / ns as f64; ns],
        vec![Segment { start: 0, tables: a }, Segment { start: 1, tables: b }],
    )
}

const SAME_POLICY_DRAWS: usize = 3;

/// Optimal Q gap per step, optimal V gap and same-policy V gap for one pair.
pub fn gap_instance(cfg: &SuiteConfig, instance: usize) -> Result<Vec<CheckRecord>> {
    let mut rng = run_rng(cfg.seed, instance as u64);
    let mdp = random_pair(&mut rng)?;
    let (gamma, horizon, r_max) = (mdp.discount(), mdp.horizon(), mdp.r_max());
    let b = span_local_budget(&mdp, 0, 1)?;
    let mut out = Vec::new();

    let (q0, q1) = (optimal_q_by_step(&mdp, 0)?, optimal_q_by_step(&mdp, 1)?);
    for h in 0..horizon {
        let bound = optimal_q_gap_bound(b, gamma, horizon, r_max, h)?;
        out.push(cfg.check(instance, format!("optimal_q_gap_h{h}"), q0[h].sup_distance(&q1[h]), bound));
    }
    let (v0, v1) = (optimal_values(&mdp, 0)?.0, optimal_values(&mdp, 1)?.0);
    out.push(cfg.check(
        instance,
        "optimal_v_gap".into(),
        v0.sup_distance(&v1),
        optimal_v_gap_bound(b, gamma, horizon, r_max),
    ));
    for k in 0..SAME_POLICY_DRAWS {
        let pi = random_policy(&mut rng, mdp.num_states(), mdp.num_actions())?;
        let (w0, w1) = (exact_evaluate(&mdp, 0, &pi)?.0, exact_evaluate(&mdp, 1, &pi)?.0);
        out.push(cfg.check(
            instance,
            format!("same_policy_v_gap_{k}"),
            w0.sup_distance(&w1),
            same_policy_v_gap_bound(b, gamma, horizon, r_max),
        ));
    }
    Ok(out)
}

pub fn gap_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut checks = Vec::new();
    for i in 0..cfg.instances {
        checks.extend(gap_instance(cfg, i)?);
    }
    Ok(SuiteReport { suite: "value_gaps", seed: cfg.seed, instances: cfg.instances, skipped: 0, checks })
}

fn random_drift(rng: &mut RunRng, total_time: usize, events: usize) -> Result<TimeVaryingMdp> {
    let spec = DriftMdpSpec {
        num_states: rng.random_range(2..=4),
        num_actions: rng.random_range(2..=3),
        horizon: rng.random_range(2..=4),
        discount: if rng.random_bool(0.5) { 0.5 } else { 0.9 },
        total_time,
        seed: 0,
        plan: (0..events)
            .map(|_| DriftEvent {
                time: rng.random_range(0..total_time),
                magnitude: rng.random_range(0.0..=0.5),
                target: match rng.random_range(0..3) {
                    0 => DriftTarget::Rewards,
                    1 => DriftTarget::Transitions,
                    _ => DriftTarget::Both,
                },
            })
            .collect(),
    };
    make_drift_mdp(&spec, rng)
}

const FORECAST_HORIZON_T: usize = 60;
const FORECAST_MAX_DRAWS_PER_INSTANCE: usize = 20;

/// Oracle-mode forecast from exact `Q*_t` snapshots, or `None` when the
/// combination weights exceed `weight_cap` in 2-norm.
pub fn forecast_instance(cfg: &SuiteConfig, draw: usize, weight_cap: f64) -> Result<Option<CheckRecord>> {
    let mut rng = run_rng(cfg.seed, draw as u64);
    let events = rng.random_range(1..=4);
    let mdp = random_drift(&mut rng, FORECAST_HORIZON_T, events)?;
    let window = rng.random_range(1..=6);
    let basis = match rng.random_range(0..3) {
        0 => Basis::Constant,
        1 => Basis::Identity,
        _ => Basis::Polynomial(2),
    };
    let t_m = rng.random_range(window - 1..=FORECAST_HORIZON_T - 11);
    let target = t_m + rng.random_range(1..=10);

    let times: Vec<usize> = (t_m + 1 - window..=t_m).collect();
    let history =
        times.iter().map(|&t| Ok((t as f64, optimal_values(&mdp, t)?.1))).collect::<Result<Vec<(f64, QTable)>>>()?;
    let c = combination_weights(&history.iter().map(|h| h.0).collect::<Vec<_>>(), basis, target as f64)?;
    let l = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if l > weight_cap {
        return Ok(None);
    }
    let forecast = forecast_q(&fit_forecaster(&history, basis, window)?, target as f64);
    let measured = forecast.sup_distance(&optimal_values(&mdp, target)?.1);
    let inputs = ForecastErrorInputs {
        weight_norm_cap: l,
        window,
        u: times.iter().map(|&t| compute_u(&mdp, t, target)).collect::<Result<_>>()?,
        eps: vec![0.0; window],
        gamma: mdp.discount(),
        horizon: mdp.horizon(),
        r_max: mdp.r_max(),
    };
    Ok(Some(cfg.check(draw, "forecast_error".into(), measured, forecast_error_bound(&inputs))))
}

/// Draws instances until `cfg.instances` of them satisfy the weight cap.
pub fn forecast_suite(cfg: &SuiteConfig, weight_cap: f64) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut checks = Vec::new();
    let mut draw = 0;
    while checks.len() < cfg.instances {
        if draw >= FORECAST_MAX_DRAWS_PER_INSTANCE * cfg.instances {
            return Err(Error::arg(format!("only {} of {draw} draws met the weight cap {weight_cap}", checks.len())));
        }
        if let Some(c) = forecast_instance(cfg, draw, weight_cap)? {
            checks.push(c);
        }
        draw += 1;
    }
    Ok(SuiteReport {
        suite: "forecast_error",
        seed: cfg.seed,
        instances: cfg.instances,
        skipped: draw - checks.len(),
        checks,
    })
}

/// Measured dynamic regret of one oracle-mode run against the summed bound
/// with per-interval constants, measured forecast errors and actual budgets.
pub fn regret_instance(cfg: &SuiteConfig, instance: usize) -> Result<CheckRecord> {
    let mut rng = run_rng(cfg.seed, instance as u64);
    let total_time = rng.random_range(40..=200);
    let events = rng.random_range(1..=5);
    let mdp = random_drift(&mut rng, total_time, events)?;
    let gamma = mdp.discount();
    let tau = rng.random_range(0.05..=0.5);
    let eta = rng.random_range(0.1..=1.0) * (1.0 - gamma) / tau;
    let npg = NpgConfig { eta, tau, gamma };
    let blocks = SchedulePolicyParams {
        block_len: rng.random_range(5..=20),
        update_fraction: rng.random_range(1..=10) as f64 / 10.0,
    };
    let schedule = schedule_from_blocks(&blocks, total_time)?;
    let forecast = ForecastConfig {
        basis: if rng.random_bool(0.5) { Basis::Identity } else { Basis::Constant },
        window: rng.random_range(1..=5),
    };
    let forl = ForlConfig { forecast, npg, source: QSource::Oracle, record_policies: false };
    let trace = run_forl(&mdp, &schedule, &forl, &mut rng)?;

    let constants = trace
        .intervals
        .iter()
        .map(|iv| constants_from(&mdp, iv.t, &iv.start_policy, eta, tau))
        .collect::<Result<Vec<_>>>()?;
    let deltas: Vec<f64> = trace.intervals.iter().map(|iv| iv.delta_f).collect();
    let budgets = interval_budgets(&mdp, &schedule)?;
    let (bound, _) = total_regret_bound(&constants, &schedule, &deltas, &budgets)?;
    Ok(cfg.check(instance, "dynamic_regret".into(), dynamic_regret(&trace), bound))
}

pub fn regret_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let checks = (0..cfg.instances).map(|i| regret_instance(cfg, i)).collect::<Result<_>>()?;
    Ok(SuiteReport { suite: "dynamic_regret", seed: cfg.seed, instances: cfg.instances, skipped: 0, checks })
}

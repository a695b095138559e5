//! Goal-switching cliffworld with tabular Q-learning, reactive or forecasting.
//!
//! Both methods learn `Q` with the same Q-learning updates. The reactive
//! method acts ε-greedily on `Q`. The forecasting method keeps a snapshot of
//! `Q` every [`FORECAST_SNAPSHOT_EVERY`] steps, fits a least-squares trend to
//! the last [`FORECAST_WINDOW`] snapshots and acts ε-greedily on the trend
//! extrapolated one snapshot interval ahead. Until the window is full it acts
//! on `Q`.

use std::fmt::Write as _;

use rand::Rng;

use crate::environments::{CliffAction, CliffworldSpec, START};
use crate::forecast::{fit_forecaster, forecast_q, Basis};
use crate::learner::{epsilon_greedy, q_learning_step, QLearnConfig};
use crate::mdp::{QTable, Transition};
use crate::{fmt_f64, Error, Result};

pub const FORECAST_SNAPSHOT_EVERY: usize = 500;
pub const FORECAST_WINDOW: usize = 10;

/// `(α, ε)` pairs of the reported hyperparameter grid.
pub const ALPHA_EPSILON_GRID: [(f64, f64); 6] =
    [(0.05, 0.05), (0.1, 0.1), (0.1, 0.05), (0.2, 0.1), (0.2, 0.05), (0.3, 0.1)];

pub const CLIFF_CSV_HEADER: &str = "step,reward,method,alpha,epsilon,seed";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffMethod {
    Reactive,
    Forecast,
}

impl CliffMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CliffMethod::Reactive => "reactive",
            CliffMethod::Forecast => "forecast",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "reactive" => Ok(CliffMethod::Reactive),
            "forecast" => Ok(CliffMethod::Forecast),
            _ => Err(Error::arg(format!("unknown method {s:?}, expected reactive or forecast"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CliffRunConfig {
    pub spec: CliffworldSpec,
    pub method: CliffMethod,
    pub alpha: f64,
    pub epsilon: f64,
    pub snapshot_every: usize,
    pub window: usize,
    pub basis: Basis,
}

impl CliffRunConfig {
    pub fn new(spec: CliffworldSpec, method: CliffMethod, alpha: f64, epsilon: f64) -> Self {
        CliffRunConfig {
            spec,
            method,
            alpha,
            epsilon,
            snapshot_every: FORECAST_SNAPSHOT_EVERY,
            window: FORECAST_WINDOW,
            basis: Basis::Identity,
        }
    }
}

/// Reward received at each of the `total_steps` environment steps.
pub fn run_cliffworld<R: Rng + ?Sized>(cfg: &CliffRunConfig, rng: &mut R) -> Result<Vec<f64>> {
    let spec = &cfg.spec;
    // Builds the tables once to validate the spec.
    crate::environments::make_cliffworld(spec)?;
    let ql = QLearnConfig { alpha: cfg.alpha, epsilon: cfg.epsilon, gamma: spec.discount };
    ql.validate()?;
    if cfg.snapshot_every == 0 || cfg.window == 0 {
        return Err(Error::arg("snapshot interval and window must be positive"));
    }

    let na = CliffAction::ALL.len();
    let mut q = QTable::zeros(spec.num_states(), na);
    let mut forecast: Option<QTable> = None;
    let mut snapshots: Vec<(f64, QTable)> = Vec::new();
    let mut rewards = Vec::with_capacity(spec.total_steps);
    let mut cell = START;
    let mut episode_len = 0;

    for step in 0..spec.total_steps {
        let s = cell.index();
        let acting = forecast.as_ref().unwrap_or(&q);
        let a = epsilon_greedy(acting, s, cfg.epsilon, rng);
        let out = spec.step(step, cell, CliffAction::from_index(a));
        let tr = Transition { state: s, action: a, reward: out.reward, next_state: out.next.index() };
        q_learning_step(&mut q, &tr, &ql, out.terminal)?;
        rewards.push(out.reward);

        episode_len += 1;
        if out.terminal || episode_len >= spec.max_episode_steps {
            cell = START;
            episode_len = 0;
        } else {
            cell = out.next;
        }

        let done = step + 1;
        if cfg.method == CliffMethod::Forecast && done % cfg.snapshot_every == 0 {
            snapshots.push((done as f64, q.clone()));
            if snapshots.len() > cfg.window {
                snapshots.remove(0);
            }
            if snapshots.len() == cfg.window {
                let model = fit_forecaster(&snapshots, cfg.basis, cfg.window)?;
                forecast = Some(forecast_q(&model, (done + cfg.snapshot_every) as f64));
            }
        }
    }
    Ok(rewards)
}

/// CSV rows `step,reward,method,alpha,epsilon,seed` without a header.
pub fn cliff_csv_rows(rewards: &[f64], method: CliffMethod, alpha: f64, epsilon: f64, seed: u64) -> String {
    let mut out = String::new();
    let (m, a, e) = (method.as_str(), fmt_f64(alpha), fmt_f64(epsilon));
    for (step, r) in rewards.iter().enumerate() {
        let _ = writeln!(out, "{step},{},{m},{a},{e},{seed}", fmt_f64(*r));
    }
    out
}

/// Mean per-step rewards of the two methods before and after the switch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoverySummary {
    pub forecast_pre: f64,
    pub forecast_post: f64,
    pub reactive_pre: f64,
    pub reactive_post: f64,
}

impl RecoverySummary {
    /// `forecast_pre - reactive_post`
    pub fn pre_switch_gap(&self) -> f64 {
        self.forecast_pre - self.reactive_post
    }

    /// Forecast beats reactive after the switch by at least half of the gap
    /// between the forecast method's converged reward and the reactive
    /// method's post-switch reward, and that gap is positive.
    pub fn recovers(&self) -> bool {
        let gap = self.pre_switch_gap();
        gap > 0.0 && self.forecast_post - self.reactive_post >= 0.5 * gap
    }
}

/// Averages reward runs over the `pre` and `post` step windows.
pub fn recovery_summary(
    forecast: &[Vec<f64>],
    reactive: &[Vec<f64>],
    pre: std::ops::Range<usize>,
    post: std::ops::Range<usize>,
) -> Result<RecoverySummary> {
    let mean = |runs: &[Vec<f64>], w: &std::ops::Range<usize>| -> Result<f64> {
        if runs.is_empty() || w.is_empty() || runs.iter().any(|r| r.len() < w.end) {
            return Err(Error::arg("reward runs do not cover the requested window"));
        }
        let total: f64 = runs.iter().map(|r| r[w.clone()].iter().sum::<f64>()).sum();
        Ok(total / (runs.len() * w.len()) as f64)
    };
    Ok(RecoverySummary {
        forecast_pre: mean(forecast, &pre)?,
        forecast_post: mean(forecast, &post)?,
        reactive_pre: mean(reactive, &pre)?,
        reactive_post: mean(reactive, &post)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{FIRST_GOAL, SECOND_GOAL};
    use crate::seeding::run_rng;

    fn short(switch_step: usize) -> CliffworldSpec {
        CliffworldSpec { switch_step, total_steps: 3000, ..Default::default() }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = CliffRunConfig::new(short(1500), CliffMethod::Forecast, 0.2, 0.1);
        let a = run_cliffworld(&cfg, &mut run_rng(3, 0)).unwrap();
        let b = run_cliffworld(&cfg, &mut run_rng(3, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3000);
        let c = run_cliffworld(&cfg, &mut run_rng(4, 0)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn forecast_matches_reactive_until_window_fills() {
        let spec = short(3000);
        let mut r = CliffRunConfig::new(spec, CliffMethod::Reactive, 0.1, 0.1);
        let mut f = CliffRunConfig::new(spec, CliffMethod::Forecast, 0.1, 0.1);
        r.snapshot_every = 100;
        f.snapshot_every = 100;
        let a = run_cliffworld(&r, &mut run_rng(1, 0)).unwrap();
        let b = run_cliffworld(&f, &mut run_rng(1, 0)).unwrap();
        assert_eq!(a[..1000], b[..1000]);
    }

    #[test]
    fn rewards_come_from_the_spec() {
        let spec = short(1000);
        let cfg = CliffRunConfig::new(spec, CliffMethod::Reactive, 0.3, 0.1);
        let r = run_cliffworld(&cfg, &mut run_rng(0, 0)).unwrap();
        assert!(r.iter().all(|&x| x == -1.0 || x == 100.0 || x == -100.0));
        assert_ne!(FIRST_GOAL, SECOND_GOAL);
    }

    /// With no switch a single goal is learned by both methods.
    #[test]
    fn stationary_goal_is_learned() {
        let spec = CliffworldSpec { switch_step: 0, total_steps: 8000, ..Default::default() };
        for method in [CliffMethod::Reactive, CliffMethod::Forecast] {
            let cfg = CliffRunConfig::new(spec, method, 0.2, 0.05);
            let r = run_cliffworld(&cfg, &mut run_rng(2, 0)).unwrap();
            let late: f64 = r[6000..].iter().sum::<f64>() / 2000.0;
            assert!(late > 0.0, "{} late mean {late}", method.as_str());
        }
    }

    #[test]
    fn summary_rule() {
        let s = RecoverySummary { forecast_pre: 5.0, forecast_post: 4.0, reactive_pre: 5.0, reactive_post: -1.0 };
        assert!(s.recovers());
        let s = RecoverySummary { forecast_post: 1.0, ..s };
        assert!(!s.recovers());
        let runs = vec![vec![1.0, 2.0, 3.0, 4.0]];
        let s = recovery_summary(&runs, &runs, 0..2, 2..4).unwrap();
        assert_eq!((s.forecast_pre, s.forecast_post), (1.5, 3.5));
        assert!(recovery_summary(&runs, &runs, 0..2, 2..5).is_err());
    }

    #[test]
    fn csv_rows() {
        let rows = cliff_csv_rows(&[-1.0, 100.0], CliffMethod::Reactive, 0.1, 0.05, 7);
        assert_eq!(rows, "0,-1.0,reactive,0.1,0.05,7\n1,100.0,reactive,0.1,0.05,7\n");
        assert!(CliffMethod::parse("other").is_err());
    }
}

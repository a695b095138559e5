//! The forecasting online RL loop.
//!
//! At every tick `t` the current policy is rolled out once in `M_t` and a Q
//! snapshot is recorded. At each `t_m` the snapshots are extrapolated to
//! `t_{m+1}`; the policy then takes one NPG step per tick against that
//! forecast for `G_m` ticks and is frozen for the remaining `N_m` ticks.

use rand::Rng;

use super::schedule::{schedule_diagnostic, Phase, UpdateSchedule};
use super::trace::{IntervalRecord, RegretTrace, TickRecord};
use crate::forecast::{combination_weights, fit_forecaster, forecast_q, Basis};
use crate::learner::{npg_entropy_update, q_learning_step, NpgConfig, QLearnConfig};
use crate::mdp::{exact_evaluate, optimal_values, rollout, QTable, TabularPolicy, TimeVaryingMdp};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForecastConfig {
    pub basis: Basis,
    pub window: usize,
}

/// Where the Q snapshots fed to the forecaster come from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QSource {
    /// Exact `Q*_t` from dynamic programming.
    Oracle,
    /// A Q-learning estimate updated on every rolled-out episode.
    Empirical(QLearnConfig),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForlConfig {
    pub forecast: ForecastConfig,
    pub npg: NpgConfig,
    pub source: QSource,
    pub record_policies: bool,
}

/// `V*_t` and `Q*_t` for the segment in force, recomputed only at change-points.
struct OptimalCache {
    segment: Option<usize>,
    v_star: f64,
    q_star: QTable,
}

impl OptimalCache {
    fn at(&mut self, mdp: &TimeVaryingMdp, t: usize) -> Result<(f64, &QTable)> {
        mdp.check_time(t)?;
        let seg = mdp.segment_index(t);
        if self.segment != Some(seg) {
            let (v, q, _) = optimal_values(mdp, t)?;
            self.v_star = mdp.average_value(&v);
            self.q_star = q;
            self.segment = Some(seg);
        }
        Ok((self.v_star, &self.q_star))
    }
}

pub fn run_forl<R: Rng + ?Sized>(
    mdp: &TimeVaryingMdp,
    schedule: &UpdateSchedule,
    cfg: &ForlConfig,
    rng: &mut R,
) -> Result<RegretTrace> {
    if let Some(msg) = schedule_diagnostic(schedule, mdp.total_time()) {
        return Err(Error::arg(format!("invalid schedule: {msg}")));
    }
    if schedule.end() != mdp.total_time() {
        return Err(Error::arg(format!("schedule ends at {}, expected T = {}", schedule.end(), mdp.total_time())));
    }
    cfg.npg.validate()?;
    if cfg.npg.gamma != mdp.discount() {
        return Err(Error::arg("NPG discount differs from the MDP discount"));
    }
    if cfg.forecast.window == 0 {
        return Err(Error::arg("forecast window must be positive"));
    }
    if let QSource::Empirical(q) = &cfg.source {
        q.validate()?;
    }

    let (ns, na) = (mdp.num_states(), mdp.num_actions());
    let mut pi = TabularPolicy::uniform(ns, na);
    let mut q_hat = QTable::zeros(ns, na);
    let mut snapshots: Vec<(f64, QTable)> = Vec::new();
    let mut cache = OptimalCache { segment: None, v_star: 0.0, q_star: QTable::zeros(ns, na) };
    let mut v_pi_cache: Option<(usize, f64)> = None;
    let mut forecast = QTable::zeros(ns, na);

    let mut ticks = Vec::with_capacity(mdp.total_time());
    let mut intervals = Vec::with_capacity(schedule.entries.len());
    let mut policies = cfg.record_policies.then(Vec::new);

    for t in 0..mdp.total_time() {
        let (m, phase) = schedule.locate(t).expect("validated schedule covers every tick");
        let traj = rollout(mdp, t, &pi, rng)?;
        let episode_return = traj.transitions.iter().map(|tr| tr.reward).sum();

        let (v_star, q_star) = cache.at(mdp, t)?;
        let q_star = q_star.clone();
        let seg = mdp.segment_index(t);
        let v_pi = match v_pi_cache {
            Some((s, v)) if s == seg => v,
            _ => {
                let v = mdp.average_value(&exact_evaluate(mdp, t, &pi)?.0);
                v_pi_cache = Some((seg, v));
                v
            }
        };
        ticks.push(TickRecord { t, m, phase, v_star, v_pi, episode_return });
        if let Some(p) = policies.as_mut() {
            p.push(pi.clone());
        }

        let snapshot = match &cfg.source {
            QSource::Oracle => q_star,
            QSource::Empirical(qcfg) => {
                for tr in &traj.transitions {
                    q_learning_step(&mut q_hat, tr, qcfg, false)?;
                }
                q_hat.clone()
            }
        };
        snapshots.push((t as f64, snapshot));
        if snapshots.len() > cfg.forecast.window {
            snapshots.remove(0);
        }

        let entry = schedule.entries[m];
        if t == entry.t {
            let target = entry.end();
            let model = fit_forecaster(&snapshots, cfg.forecast.basis, snapshots.len())?;
            forecast = forecast_q(&model, target as f64);
            let (_, q_target) = cache.at(mdp, target)?;
            let delta_f = forecast.sup_distance(q_target);
            // Restore the cache to the current tick's segment.
            cache.at(mdp, t)?;
            intervals.push(IntervalRecord {
                m,
                t: entry.t,
                g: entry.g,
                n: entry.n,
                start_policy: pi.clone(),
                forecast: forecast.clone(),
                delta_f,
                combination_weights: combination_weights(&model.fitted_times, cfg.forecast.basis, target as f64)?,
                snapshot_times: snapshots.iter().map(|(t, _)| *t as usize).collect(),
            });
        }

        if phase == Phase::Update {
            pi = npg_entropy_update(&pi, &forecast, &cfg.npg)?;
            v_pi_cache = None;
        }
    }
    Ok(RegretTrace { ticks, intervals, policies })
}

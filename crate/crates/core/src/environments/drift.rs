//! Seeded random MDPs with scheduled perturbations.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::mdp::{MdpTables, Segment, TimeVaryingMdp};
use crate::seeding::run_rng;
use crate::{Error, Result};

/// Rewards are drawn from `[0, R_MAX]` and stay there after perturbation.
pub const R_MAX: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriftTarget {
    Rewards,
    Transitions,
    Both,
}

/// A perturbation applied between ticks `time` and `time + 1`, so that the
/// perturbed tables are in force from tick `time + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftEvent {
    pub time: usize,
    pub magnitude: f64,
    pub target: DriftTarget,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftMdpSpec {
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub discount: f64,
    pub total_time: usize,
    pub seed: u64,
    pub plan: Vec<DriftEvent>,
}

impl DriftMdpSpec {
    /// Builds the MDP from the spec's own seed.
    pub fn build(&self) -> Result<TimeVaryingMdp> {
        make_drift_mdp(self, &mut run_rng(self.seed, 0))
    }
}

pub(crate) fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut row: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let z: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= z);
    row
}

fn random_tables<R: Rng + ?Sized>(ns: usize, na: usize, rng: &mut R) -> Result<MdpTables> {
    let rewards = (0..ns * na).map(|_| rng.random_range(0.0..=R_MAX)).collect();
    let transitions = (0..ns * na).flat_map(|_| random_simplex(ns, rng)).collect();
    MdpTables::new(ns, na, rewards, transitions)
}

fn perturb<R: Rng + ?Sized>(tables: &MdpTables, ev: &DriftEvent, rng: &mut R) -> Result<MdpTables> {
    let ns = tables.num_states();
    let m = ev.magnitude;
    let mut rewards = tables.rewards().to_vec();
    let mut transitions = tables.transitions().to_vec();
    if matches!(ev.target, DriftTarget::Rewards | DriftTarget::Both) {
        for r in &mut rewards {
            *r = (*r + rng.random_range(-m..=m)).clamp(0.0, R_MAX);
        }
    }
    if matches!(ev.target, DriftTarget::Transitions | DriftTarget::Both) {
        for row in transitions.chunks_mut(ns) {
            let q = random_simplex(ns, rng);
            row.iter_mut().zip(&q).for_each(|(p, q)| *p = (1.0 - m) * *p + m * q);
            let z: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= z);
        }
    }
    MdpTables::new(tables.num_states(), tables.num_actions(), rewards, transitions)
}

/// Random base MDP at tick 0, then the plan's perturbations in time order.
pub fn make_drift_mdp<R: Rng + ?Sized>(spec: &DriftMdpSpec, rng: &mut R) -> Result<TimeVaryingMdp> {
    for ev in &spec.plan {
        if !(ev.magnitude.is_finite() && ev.magnitude >= 0.0) {
            return Err(Error::arg(format!("drift magnitude {} must be nonnegative", ev.magnitude)));
        }
        if ev.target != DriftTarget::Rewards && ev.magnitude > 1.0 {
            return Err(Error::arg(format!("transition mixing weight {} outside [0, 1]", ev.magnitude)));
        }
        if ev.time >= spec.total_time {
            return Err(Error::arg(format!("drift at {} must precede T = {}", ev.time, spec.total_time)));
        }
    }
    if spec.num_states == 0 || spec.num_actions == 0 {
        return Err(Error::arg("state and action counts must be positive"));
    }
    let mut plan = spec.plan.clone();
    plan.sort_by_key(|e| e.time);

    let base = random_tables(spec.num_states, spec.num_actions, rng)?;
    let mut segments = vec![Segment { start: 0, tables: base }];
    for ev in &plan {
        let current = &segments.last().unwrap().tables;
        let tables = perturb(current, ev, rng)?;
        let start = ev.time + 1;
        match segments.last_mut() {
            Some(last) if last.start == start => last.tables = tables,
            _ => segments.push(Segment { start, tables }),
        }
    }
    let init = vec![1.0 / spec.num_states as f64; spec.num_states];
    TimeVaryingMdp::new(spec.horizon, spec.discount, spec.total_time, init, segments)
}

//! Finite-horizon backward induction on a frozen `M_t`.
//!
//! Step `h` tables cover the rewards collected at steps `h..H`; the tables
//! returned at the top level are the step-0 ones.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;

use super::{MdpTables, QTable, TabularPolicy, TimeVaryingMdp, ValueTable};
use crate::{Error, Result};

/// One `(s, a, r, s')` step of an episode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub transitions: Vec<Transition>,
}

fn check_policy_shape(tables: &MdpTables, policy: &TabularPolicy) -> Result<()> {
    if policy.num_states() != tables.num_states() || policy.num_actions() != tables.num_actions() {
        return Err(Error::arg("policy shape does not match the MDP"));
    }
    Ok(())
}

/// `Q(s,a) = R(s,a) + γ Σ_s' P(s'|s,a) V(s')`
fn backup(tables: &MdpTables, gamma: f64, v_next: &[f64], q: &mut [f64]) {
    let na = tables.num_actions();
    for s in 0..tables.num_states() {
        for a in 0..na {
            let ev: f64 = tables.transition(s, a).iter().zip(v_next).map(|(p, v)| p * v).sum();
            q[s * na + a] = tables.reward(s, a) + gamma * ev;
        }
    }
}

/// `V^π` and `Q^π` of a stationary policy over `horizon` steps of fixed tables.
pub fn evaluate_tables(
    tables: &MdpTables,
    gamma: f64,
    horizon: usize,
    policy: &TabularPolicy,
) -> Result<(ValueTable, QTable)> {
    check_policy_shape(tables, policy)?;
    let (ns, na) = (tables.num_states(), tables.num_actions());
    let mut v = vec![0.0; ns];
    let mut q = vec![0.0; ns * na];
    for _ in 0..horizon {
        backup(tables, gamma, &v, &mut q);
        for (s, vs) in v.iter_mut().enumerate() {
            *vs = policy.row(s).iter().zip(&q[s * na..(s + 1) * na]).map(|(p, x)| p * x).sum();
        }
    }
    Ok((ValueTable { values: v }, QTable::from_vec(ns, na, q)?))
}

/// `V^π_t`, `Q^π_t` by backward induction over the episode horizon.
pub fn exact_evaluate(mdp: &TimeVaryingMdp, t: usize, policy: &TabularPolicy) -> Result<(ValueTable, QTable)> {
    evaluate_tables(mdp.tables_at(t)?, mdp.discount(), mdp.horizon(), policy)
}

/// Optimal Q tables for every step, `result[h] = Q*_h`.
pub fn optimal_tables(tables: &MdpTables, gamma: f64, horizon: usize) -> Vec<QTable> {
    let (ns, na) = (tables.num_states(), tables.num_actions());
    let mut v = vec![0.0; ns];
    let mut q = vec![0.0; ns * na];
    let mut steps = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        backup(tables, gamma, &v, &mut q);
        for (s, vs) in v.iter_mut().enumerate() {
            *vs = q[s * na..(s + 1) * na].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        }
        steps.push(QTable { num_states: ns, num_actions: na, values: q.clone() });
    }
    steps.reverse();
    steps
}

/// `Q*_{t,h}` for `h = 0..H`.
pub fn optimal_q_by_step(mdp: &TimeVaryingMdp, t: usize) -> Result<Vec<QTable>> {
    Ok(optimal_tables(mdp.tables_at(t)?, mdp.discount(), mdp.horizon()))
}

/// `V*_t`, `Q*_t` (step 0) and the greedy policy on `Q*_t`.
pub fn optimal_values(mdp: &TimeVaryingMdp, t: usize) -> Result<(ValueTable, QTable, TabularPolicy)> {
    let q = optimal_q_by_step(mdp, t)?.swap_remove(0);
    let v = (0..q.num_states()).map(|s| q.max(s)).collect();
    let pi = TabularPolicy::greedy(&q);
    Ok((ValueTable { values: v }, q, pi))
}

/// Entropy-regularised optimum: the max over actions is replaced by
/// `τ log Σ_a exp(Q(s,a)/τ)`. The returned policy is the softmax of the
/// regularised step-0 Q at temperature `τ`.
pub fn soft_optimal_values(mdp: &TimeVaryingMdp, t: usize, tau: f64) -> Result<(ValueTable, QTable, TabularPolicy)> {
    if !(tau > 0.0) {
        return Err(Error::arg(format!("tau must be positive, got {tau}")));
    }
    let tables = mdp.tables_at(t)?;
    let (ns, na) = (tables.num_states(), tables.num_actions());
    let mut v = vec![0.0; ns];
    let mut q = vec![0.0; ns * na];
    for _ in 0..mdp.horizon() {
        backup(tables, mdp.discount(), &v, &mut q);
        for (s, vs) in v.iter_mut().enumerate() {
            let row = &q[s * na..(s + 1) * na];
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse: f64 = row.iter().map(|x| ((x - m) / tau).exp()).sum::<f64>().ln();
            *vs = m + tau * lse;
        }
    }
    let q = QTable::from_vec(ns, na, q)?;
    let pi = TabularPolicy::softmax(&q, tau)?;
    Ok((ValueTable { values: v }, q, pi))
}

/// Samples one `H`-step episode of `π` in `M_t`, starting from the initial distribution.
pub fn rollout<R: Rng + ?Sized>(
    mdp: &TimeVaryingMdp,
    t: usize,
    policy: &TabularPolicy,
    rng: &mut R,
) -> Result<Trajectory> {
    let tables = mdp.tables_at(t)?;
    check_policy_shape(tables, policy)?;
    let mut state = sample(mdp.initial_dist(), rng)?;
    let mut transitions = Vec::with_capacity(mdp.horizon());
    for _ in 0..mdp.horizon() {
        let action = sample(policy.row(state), rng)?;
        let next_state = sample(tables.transition(state, action), rng)?;
        transitions.push(Transition { state, action, reward: tables.reward(state, action), next_state });
        state = next_state;
    }
    Ok(Trajectory { transitions })
}

fn sample<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    // A single point mass needs no randomness; keeps deterministic MDPs seed-independent.
    if let Some(i) = weights.iter().position(|&w| w == 1.0) {
        return Ok(i);
    }
    let dist = WeightedIndex::new(weights).map_err(|e| Error::model(e.to_string()))?;
    Ok(dist.sample(rng))
}

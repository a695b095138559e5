//! Policy improvement: entropy-regularised NPG and tabular Q-learning.

use rand::Rng;

use crate::mdp::{QTable, TabularPolicy, Transition};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NpgConfig {
    pub eta: f64,
    pub tau: f64,
    pub gamma: f64,
}

impl NpgConfig {
    pub fn validate(&self) -> Result<()> {
        let NpgConfig { eta, tau, gamma } = *self;
        if !(eta > 0.0 && tau > 0.0) {
            return Err(Error::arg(format!("eta ({eta}) and tau ({tau}) must be positive")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::arg(format!("gamma {gamma} outside (0, 1)")));
        }
        if eta * tau >= 1.0 {
            return Err(Error::arg(format!("eta * tau = {} must be below 1", eta * tau)));
        }
        if eta * tau / (1.0 - gamma) > 1.0 {
            return Err(Error::arg(format!(
                "eta * tau / (1 - gamma) = {} must not exceed 1",
                eta * tau / (1.0 - gamma)
            )));
        }
        Ok(())
    }

    /// `1 - ητ`, the per-iteration contraction factor.
    pub fn contraction(&self) -> f64 {
        1.0 - self.eta * self.tau
    }
}

/// `π'(·|s) ∝ π(·|s)^{1 - ητ/(1-γ)} exp(η Q(s,·) / (1-γ))`, evaluated in log space.
pub fn npg_entropy_update(policy: &TabularPolicy, q: &QTable, cfg: &NpgConfig) -> Result<TabularPolicy> {
    cfg.validate()?;
    if policy.num_states() != q.num_states() || policy.num_actions() != q.num_actions() {
        return Err(Error::arg("policy and Q table shapes differ"));
    }
    let keep = 1.0 - cfg.eta * cfg.tau / (1.0 - cfg.gamma);
    let step = cfg.eta / (1.0 - cfg.gamma);
    let logits: Vec<f64> = policy.probs().iter().zip(q.values()).map(|(p, x)| keep * p.ln() + step * x).collect();
    TabularPolicy::from_logits(policy.num_states(), policy.num_actions(), &logits)
}

/// `π¹..π^g`, each one update of its predecessor against the same `q`.
pub fn npg_iterate(policy: &TabularPolicy, q: &QTable, cfg: &NpgConfig, g: usize) -> Result<Vec<TabularPolicy>> {
    let mut out: Vec<TabularPolicy> = Vec::with_capacity(g);
    for _ in 0..g {
        let next = npg_entropy_update(out.last().unwrap_or(policy), q, cfg)?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QLearnConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub gamma: f64,
}

impl QLearnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha <= 1.0) {
            return Err(Error::arg(format!("step size {} outside [0, 1]", self.alpha)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon <= 1.0) {
            return Err(Error::arg(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(Error::arg(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        Ok(())
    }
}

/// `Q(s,a) <- (1-α) Q(s,a) + α (r + γ max_a' Q(s',a') [not terminal])`
pub fn q_learning_step(q: &mut QTable, tr: &Transition, cfg: &QLearnConfig, terminal: bool) -> Result<()> {
    let (ns, na) = (q.num_states(), q.num_actions());
    if tr.state >= ns || tr.next_state >= ns || tr.action >= na {
        return Err(Error::arg(format!(
            "transition ({}, {}, {}) outside a {ns}x{na} table",
            tr.state, tr.action, tr.next_state
        )));
    }
    let bootstrap = if terminal { 0.0 } else { cfg.gamma * q.max(tr.next_state) };
    let old = q.get(tr.state, tr.action);
    q.set(tr.state, tr.action, (1.0 - cfg.alpha) * old + cfg.alpha * (tr.reward + bootstrap));
    Ok(())
}

/// Greedy action (lowest index on ties) with probability `1 - ε`, otherwise uniform.
pub fn epsilon_greedy<R: Rng + ?Sized>(q: &QTable, s: usize, epsilon: f64, rng: &mut R) -> usize {
    if rng.random::<f64>() < epsilon {
        rng.random_range(0..q.num_actions())
    } else {
        q.argmax(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::run_rng;

    const CFG: NpgConfig = NpgConfig { eta: 0.1, tau: 0.1, gamma: 0.9 };

    #[test]
    fn worked_example() {
        let pi = TabularPolicy::uniform(1, 2);
        let q = QTable::from_vec(1, 2, vec![1.0, 0.0]).unwrap();
        let next = npg_entropy_update(&pi, &q, &CFG).unwrap();
        let e = std::f64::consts::E;
        assert!((next.prob(0, 0) - e / (1.0 + e)).abs() < 1e-12);
    }

    #[test]
    fn constant_q_keeps_uniform() {
        let pi = TabularPolicy::uniform(2, 3);
        let q = QTable::from_vec(2, 3, vec![4.0, 4.0, 4.0, -1.0, -1.0, -1.0]).unwrap();
        let next = npg_entropy_update(&pi, &q, &CFG).unwrap();
        assert!(next.sup_distance(&pi) < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(NpgConfig { eta: 2.0, tau: 0.6, gamma: 0.5 }.validate().is_err());
        assert!(NpgConfig { eta: 0.5, tau: 0.5, gamma: 0.5 }.validate().is_ok());
        assert!(NpgConfig { eta: 0.5, tau: 0.5, gamma: 0.8 }.validate().is_err());
        assert!(NpgConfig { eta: 0.0, tau: 0.5, gamma: 0.5 }.validate().is_err());
        let pi = TabularPolicy::uniform(1, 2);
        let q = QTable::zeros(1, 2);
        assert!(npg_entropy_update(&pi, &q, &NpgConfig { eta: 1.0, ..CFG }).is_err());
    }

    #[test]
    fn iterate_lengths() {
        let pi = TabularPolicy::uniform(1, 2);
        let q = QTable::from_vec(1, 2, vec![0.3, 0.0]).unwrap();
        assert!(npg_iterate(&pi, &q, &CFG, 0).unwrap().is_empty());
        let seq = npg_iterate(&pi, &q, &CFG, 5).unwrap();
        assert_eq!(seq.len(), 5);
        assert_eq!(seq[1], npg_entropy_update(&seq[0], &q, &CFG).unwrap());
    }

    #[test]
    fn q_learning_basics() {
        let cfg = QLearnConfig { alpha: 1.0, epsilon: 0.0, gamma: 0.9 };
        let mut q = QTable::from_vec(2, 2, vec![0.0, 0.0, 5.0, 1.0]).unwrap();
        let tr = Transition { state: 0, action: 1, reward: 2.0, next_state: 1 };
        q_learning_step(&mut q, &tr, &cfg, true).unwrap();
        assert_eq!(q.values(), &[0.0, 2.0, 5.0, 1.0]);
        q_learning_step(&mut q, &tr, &cfg, false).unwrap();
        assert_eq!(q.get(0, 1), 2.0 + 0.9 * 5.0);
        let frozen = q.clone();
        q_learning_step(&mut q, &tr, &QLearnConfig { alpha: 0.0, ..cfg }, false).unwrap();
        assert_eq!(q, frozen);
        let bad = Transition { state: 2, ..tr };
        assert!(q_learning_step(&mut q, &bad, &cfg, false).is_err());
    }

    #[test]
    fn greedy_ties_pick_lowest() {
        let q = QTable::from_vec(1, 3, vec![0.0, 2.0, 2.0]).unwrap();
        let mut rng = run_rng(5, 0);
        assert!((0..100).all(|_| epsilon_greedy(&q, 0, 0.0, &mut rng) == 1));
    }
}

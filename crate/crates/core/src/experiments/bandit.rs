//! Preference-weight policies on the switching bandit.
//!
//! `β_t = π_t(a0)`. Rewards are the expected per-tick rewards
//! `β_t R_t(a0) + (1 - β_t) R_t(a1)`, so runs are deterministic.

use crate::environments::{make_switch_bandit, SwitchBanditSpec};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum BetaSchedule {
    Constant(f64),
    /// `β_t = from + (to - from) (t / (T-1))^power`; powers below 1 move early
    /// (conservative), above 1 move late (pessimistic).
    Tempo {
        from: f64,
        to: f64,
        power: f64,
    },
    /// Piecewise constant: `(t_i, β_i)` holds from `t_i` until the next entry.
    /// The first entry must start at 0.
    Steps(Vec<(usize, f64)>),
}

impl BetaSchedule {
    pub fn conservative() -> Self {
        BetaSchedule::Tempo { from: 0.0, to: 1.0, power: 0.5 }
    }

    pub fn pessimistic() -> Self {
        BetaSchedule::Tempo { from: 0.0, to: 1.0, power: 2.0 }
    }

    fn validate(&self) -> Result<()> {
        let ok = |b: f64| (0.0..=1.0).contains(&b);
        let valid = match self {
            BetaSchedule::Constant(b) => ok(*b),
            BetaSchedule::Tempo { from, to, power } => ok(*from) && ok(*to) && *power > 0.0,
            BetaSchedule::Steps(steps) => {
                steps.first().is_some_and(|s| s.0 == 0)
                    && steps.windows(2).all(|w| w[0].0 < w[1].0)
                    && steps.iter().all(|s| ok(s.1))
            }
        };
        if valid {
            Ok(())
        } else {
            Err(Error::arg(format!("invalid beta schedule {self:?}")))
        }
    }

    pub fn beta_at(&self, t: usize, total_time: usize) -> f64 {
        match self {
            BetaSchedule::Constant(b) => *b,
            BetaSchedule::Tempo { from, to, power } => {
                let x = if total_time > 1 { t as f64 / (total_time - 1) as f64 } else { 1.0 };
                from + (to - from) * x.powf(*power)
            }
            BetaSchedule::Steps(steps) => steps[steps.partition_point(|s| s.0 <= t) - 1].1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BanditStep {
    pub t: usize,
    pub beta: f64,
    pub reward: f64,
}

/// Expected reward at every tick `0..T`.
pub fn run_bandit(spec: &SwitchBanditSpec, schedule: &BetaSchedule) -> Result<Vec<BanditStep>> {
    schedule.validate()?;
    let mdp = make_switch_bandit(spec)?;
    (0..spec.total_time)
        .map(|t| {
            let beta = schedule.beta_at(t, spec.total_time);
            let tables = mdp.tables_at(t)?;
            let reward = beta * tables.reward(0, 0) + (1.0 - beta) * tables.reward(0, 1);
            Ok(BanditStep { t, beta, reward })
        })
        .collect()
}

//! Constants `C1..C5` and the update / hold / total regret upper bounds.

use crate::learner::NpgConfig;
use crate::mdp::{exact_evaluate, soft_optimal_values, span_cumulative_budget, TabularPolicy, TimeVaryingMdp};
use crate::scheduler::UpdateSchedule;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub eta: f64,
    pub tau: f64,
    pub gamma: f64,
    pub horizon: usize,
    pub r_max: f64,
    pub action_count: usize,
}

impl BoundConstants {
    /// Fills in `C2..C5` from their closed forms around a given `C1`.
    ///
    /// `C5` carries `r_max` on the same-policy transition term as well as on
    /// the optimal-value one, see [`super::same_policy_v_gap_bound`].
    pub fn new(
        c1: f64,
        eta: f64,
        tau: f64,
        gamma: f64,
        horizon: usize,
        r_max: f64,
        action_count: usize,
    ) -> Result<Self> {
        NpgConfig { eta, tau, gamma }.validate()?;
        if !(c1 >= 0.0 && c1.is_finite()) {
            return Err(Error::arg(format!("C1 must be finite and nonnegative, got {c1}")));
        }
        if !(r_max >= 0.0) || action_count == 0 {
            return Err(Error::arg("r_max must be nonnegative and |A| positive"));
        }
        let g = gamma;
        let scale = (1.0 - g.powi(horizon as i32)) / (1.0 - g);
        let c2 = 2.0 * (g + 2.0) / (1.0 - g) * (1.0 + g / (eta * tau));
        let c3 = 2.0 * tau * (action_count as f64).ln() / (1.0 - g);
        let c4 = 2.0 * scale;
        let c5 =
            r_max * g / (1.0 - g) * (scale - g.powi(horizon as i32 - 1) * horizon as f64) + scale * r_max / (1.0 - g);
        Ok(BoundConstants { c1, c2, c3, c4, c5, eta, tau, gamma, horizon, r_max, action_count })
    }

    /// `ητ`
    pub fn eta_tau(&self) -> f64 {
        self.eta * self.tau
    }
}

/// `(γ+2)(q_gap + 2τ(1 - ητ/(1-γ)) log_gap)`
pub fn c1_from_gaps(gamma: f64, eta: f64, tau: f64, q_gap: f64, log_gap: f64) -> f64 {
    (gamma + 2.0) * (q_gap + 2.0 * tau * (1.0 - eta * tau / (1.0 - gamma)) * log_gap)
}

/// Constants at `t_m` for the policy in force there. `Q*_τ`, `π*_τ` come from
/// the soft optimum of `M_{t_m}`, the policy's own Q from exact evaluation.
pub fn constants_from(
    mdp: &TimeVaryingMdp,
    t_m: usize,
    policy: &TabularPolicy,
    eta: f64,
    tau: f64,
) -> Result<BoundConstants> {
    if eta * tau >= 1.0 {
        return Err(Error::arg(format!("eta * tau = {} must be below 1", eta * tau)));
    }
    let gamma = mdp.discount();
    NpgConfig { eta, tau, gamma }.validate()?;
    let (_, q_soft, pi_soft) = soft_optimal_values(mdp, t_m, tau)?;
    let (_, q_pi) = exact_evaluate(mdp, t_m, policy)?;
    let c1 = c1_from_gaps(gamma, eta, tau, q_soft.sup_distance(&q_pi), pi_soft.log_sup_distance(policy));
    BoundConstants::new(c1, eta, tau, gamma, mdp.horizon(), mdp.r_max(), mdp.num_actions())
}

/// `(C1/ητ)(1 - (1-ητ)^G) + G(C2 δ + C3) + C4 B̄_r + C5 B̄_p`
pub fn update_regret_bound(c: &BoundConstants, g: usize, delta_f: f64, budget: (f64, f64)) -> f64 {
    let x = c.eta_tau();
    c.c1 / x * (1.0 - (1.0 - x).powi(g as i32)) + g as f64 * (c.c2 * delta_f + c.c3) + c.c4 * budget.0 + c.c5 * budget.1
}

/// `N(C1 (1-ητ)^G + C2 δ + C3) + C4 B̄_r + C5 B̄_p`
pub fn hold_regret_bound(c: &BoundConstants, n: usize, g: usize, delta_f: f64, budget: (f64, f64)) -> f64 {
    let x = c.eta_tau();
    n as f64 * (c.c1 * (1.0 - x).powi(g as i32) + c.c2 * delta_f + c.c3) + c.c4 * budget.0 + c.c5 * budget.1
}

/// Cumulative budgets `(B̄_r, B̄_p)` of the update and hold spans of one interval.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IntervalBudgets {
    pub update: (f64, f64),
    pub hold: (f64, f64),
}

/// Budgets over `[t_m, t_m + G_m]` and `[t_m + G_m, t_{m+1}]` for every entry.
pub fn interval_budgets(mdp: &TimeVaryingMdp, schedule: &UpdateSchedule) -> Result<Vec<IntervalBudgets>> {
    schedule
        .entries
        .iter()
        .map(|e| {
            let mid = e.t + e.g;
            Ok(IntervalBudgets {
                update: span_cumulative_budget(mdp, e.t, mid)?,
                hold: span_cumulative_budget(mdp, mid, e.end())?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegretBoundParts {
    pub r_pi: f64,
    pub r_f: f64,
    pub r_env: f64,
}

impl RegretBoundParts {
    pub fn total(&self) -> f64 {
        self.r_pi + self.r_f + self.r_env
    }
}

/// Sums the per-interval bound `R^π_m + R^f_m + R^env_m` with
///
/// ```text
/// R^π_m   = C1/ητ + (N C1 - C1/ητ)(1-ητ)^G
/// R^f_m   = (N + G)(C2 δ_m + C3)
/// R^env_m = C4 (B̄_r(G) + B̄_r(N)) + C5 (B̄_p(G) + B̄_p(N))
/// ```
///
/// `constants[m]` holds the constants of interval `m`.
pub fn total_regret_bound(
    constants: &[BoundConstants],
    schedule: &UpdateSchedule,
    delta_f: &[f64],
    budgets: &[IntervalBudgets],
) -> Result<(f64, Vec<RegretBoundParts>)> {
    let m = schedule.entries.len();
    if constants.len() != m || delta_f.len() != m || budgets.len() != m {
        return Err(Error::arg(format!(
            "expected {m} intervals, got {} constants, {} forecast errors, {} budgets",
            constants.len(),
            delta_f.len(),
            budgets.len()
        )));
    }
    let parts: Vec<RegretBoundParts> = schedule
        .entries
        .iter()
        .zip(constants)
        .zip(delta_f.iter().zip(budgets))
        .map(|((e, c), (&d, b))| {
            let x = c.eta_tau();
            let (g, n) = (e.g as f64, e.n as f64);
            RegretBoundParts {
                r_pi: c.c1 / x + (n * c.c1 - c.c1 / x) * (1.0 - x).powi(e.g as i32),
                r_f: (n + g) * (c.c2 * d + c.c3),
                r_env: c.c4 * (b.update.0 + b.hold.0) + c.c5 * (b.update.1 + b.hold.1),
            }
        })
        .collect();
    Ok((parts.iter().map(RegretBoundParts::total).sum(), parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpTables;

    fn consts(c1: f64, eta: f64, tau: f64, gamma: f64) -> BoundConstants {
        BoundConstants::new(c1, eta, tau, gamma, 2, 1.0, 2).unwrap()
    }

    #[test]
    fn closed_form_constants() {
        let c = BoundConstants::new(0.0, 0.05, 0.1, 0.9, 3, 1.0, 2).unwrap();
        assert!((c.c3 - 1.386_294_361_119_890_6).abs() < 1e-12);
        let c = consts(0.0, 0.5, 0.2, 0.5);
        assert!((c.c4 - 3.0).abs() < 1e-15);
        // γ=0.5, H=2: γ/(1-γ)(1.5 - 0.5·2) + 1.5·2 = 0.5 + 3
        assert!((c.c5 - 3.5).abs() < 1e-12);
        assert!((c.c2 - 2.0 * 2.5 / 0.5 * (1.0 + 0.5 / 0.1)).abs() < 1e-12);
        assert!(c.c2 > 0.0 && c.c3 > 0.0 && c.c4 > 0.0 && c.c5 > 0.0);
    }

    #[test]
    fn rejects_large_step() {
        assert!(BoundConstants::new(0.0, 2.0, 0.5, 0.5, 2, 1.0, 2).is_err());
        assert!(BoundConstants::new(-1.0, 0.1, 0.5, 0.5, 2, 1.0, 2).is_err());
        let t = MdpTables::new(1, 2, vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let mdp = TimeVaryingMdp::stationary(2, 0.5, 3, vec![1.0], t).unwrap();
        let pi = TabularPolicy::uniform(1, 2);
        assert!(constants_from(&mdp, 0, &pi, 2.0, 0.5).is_err());
    }

    #[test]
    fn c1_vanishes_at_the_regularised_optimum() {
        assert_eq!(c1_from_gaps(0.9, 0.05, 0.1, 0.0, 0.0), 0.0);
        let t = MdpTables::new(1, 2, vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let mdp = TimeVaryingMdp::stationary(2, 0.5, 3, vec![1.0], t).unwrap();
        let (_, q_soft, pi_soft) = soft_optimal_values(&mdp, 0, 0.2).unwrap();
        let c = constants_from(&mdp, 0, &pi_soft, 0.5, 0.2).unwrap();
        // Only the entropy gap between Q*_τ and the policy's plain Q remains.
        let (_, q_pi) = exact_evaluate(&mdp, 0, &pi_soft).unwrap();
        assert!((c.c1 - 2.5 * q_soft.sup_distance(&q_pi)).abs() < 1e-12);
        let worse = constants_from(&mdp, 0, &TabularPolicy::uniform(1, 2), 0.5, 0.2).unwrap();
        assert!(worse.c1 > c.c1);
    }

    #[test]
    fn update_and_hold_examples() {
        let mut c = consts(1.0, 0.1, 1.0, 0.5);
        c.c3 = 0.0;
        assert!((update_regret_bound(&c, 10, 0.0, (0.0, 0.0)) - 10.0 * (1.0 - 0.9f64.powi(10))).abs() < 1e-12);
        assert!((update_regret_bound(&c, 10, 0.0, (0.0, 0.0)) - 6.5132).abs() < 1e-4);
        assert!((hold_regret_bound(&c, 5, 10, 0.0, (0.0, 0.0)) - 1.74339).abs() < 1e-5);
        assert_eq!(update_regret_bound(&c, 0, 0.3, (0.0, 0.0)), 0.0);
        assert_eq!(update_regret_bound(&c, 0, 0.0, (2.0, 1.0)), 2.0 * c.c4 + c.c5);
        assert_eq!(hold_regret_bound(&c, 0, 4, 0.0, (0.0, 0.0)), 0.0);
        assert!(update_regret_bound(&c, 3, 0.2, (0.0, 0.0)) > update_regret_bound(&c, 3, 0.1, (0.0, 0.0)));
        assert!(hold_regret_bound(&c, 3, 5, 0.0, (0.0, 0.0)) < hold_regret_bound(&c, 3, 4, 0.0, (0.0, 0.0)));
        assert!(hold_regret_bound(&c, 3, 5, 0.0, (0.0, 0.1)) > hold_regret_bound(&c, 3, 5, 0.0, (0.0, 0.0)));
    }

    #[test]
    fn total_splits_into_update_plus_hold() {
        let schedule = UpdateSchedule::from_triples(&[(0, 10, 3), (13, 4, 8), (25, 5, 0)]);
        let cs = [consts(1.3, 0.1, 1.0, 0.5), consts(0.2, 0.3, 0.5, 0.5), consts(4.0, 0.05, 2.0, 0.5)];
        let deltas = [0.1, 0.0, 2.5];
        let budgets = [
            IntervalBudgets { update: (0.5, 0.1), hold: (0.0, 0.2) },
            IntervalBudgets::default(),
            IntervalBudgets { update: (3.0, 0.0), hold: (0.0, 0.0) },
        ];
        let (total, parts) = total_regret_bound(&cs, &schedule, &deltas, &budgets).unwrap();
        let mut sum = 0.0;
        for (i, e) in schedule.entries.iter().enumerate() {
            let u = update_regret_bound(&cs[i], e.g, deltas[i], budgets[i].update);
            let h = hold_regret_bound(&cs[i], e.n, e.g, deltas[i], budgets[i].hold);
            assert!((parts[i].total() - (u + h)).abs() < 1e-9);
            sum += u + h;
        }
        assert!((total - sum).abs() < 1e-9);
        assert!(total_regret_bound(&cs[..2], &schedule, &deltas, &budgets).is_err());
    }

    #[test]
    fn pure_update_reduction() {
        let schedule = UpdateSchedule::from_triples(&[(0, 4, 0), (4, 7, 0)]);
        let mut c = consts(2.0, 0.2, 1.0, 0.5);
        c.c3 = 0.0;
        let (total, parts) =
            total_regret_bound(&[c, c], &schedule, &[0.0, 0.0], &[IntervalBudgets::default(); 2]).unwrap();
        let expect: f64 = [4, 7].iter().map(|&g| 2.0 / 0.2 * (1.0 - 0.8f64.powi(g))).sum();
        assert!((total - expect).abs() < 1e-12);
        assert!(parts.iter().all(|p| p.r_env == 0.0));
    }

    #[test]
    fn stationary_env_term_vanishes() {
        let t = MdpTables::new(1, 2, vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let mdp = TimeVaryingMdp::stationary(2, 0.5, 20, vec![1.0], t).unwrap();
        let schedule = UpdateSchedule::from_triples(&[(0, 5, 5), (10, 3, 7)]);
        let b = interval_budgets(&mdp, &schedule).unwrap();
        assert!(b.iter().all(|x| *x == IntervalBudgets::default()));
    }
}

//! Forecasting-error bounds for linear forecasters.

use crate::mdp::{span_local_budget, TimeVaryingMdp};
use crate::scheduler::UpdateSchedule;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ForecastErrorInputs {
    /// Cap `L` on the combination-weight norm.
    pub weight_norm_cap: f64,
    pub window: usize,
    /// Drift from each snapshot time to the forecast target.
    pub u: Vec<f64>,
    /// Estimation error of each snapshot.
    pub eps: Vec<f64>,
    pub gamma: f64,
    pub horizon: usize,
    pub r_max: f64,
}

fn value_scale(gamma: f64, horizon: usize) -> f64 {
    (1.0 - gamma.powi(horizon as i32)) / (1.0 - gamma)
}

/// `u = (1-γ^H)/(1-γ) (B_r(t, t') + r_max/(1-γ) B_p(t, t'))`
pub fn compute_u(mdp: &TimeVaryingMdp, t: usize, t_target: usize) -> Result<f64> {
    mdp.check_time(t_target)?;
    if t >= t_target {
        return Err(Error::arg(format!("need t < t_target, got {t} and {t_target}")));
    }
    let (b_r, b_p) = span_local_budget(mdp, t, t_target)?;
    let g = mdp.discount();
    Ok(mdp.value_scale() * (b_r + mdp.r_max() / (1.0 - g) * b_p))
}

/// `L sqrt(Σ_t 2 max(u_t, ε_t)²) + l_p (L + 1) (1-γ^H)/(1-γ) r_max`
pub fn forecast_error_bound(inputs: &ForecastErrorInputs) -> f64 {
    let l = inputs.weight_norm_cap;
    let sq: f64 = inputs.u.iter().zip(&inputs.eps).map(|(u, e)| 2.0 * u.max(*e).powi(2)).sum();
    l * sq.sqrt() + inputs.window as f64 * (l + 1.0) * value_scale(inputs.gamma, inputs.horizon) * inputs.r_max
}

/// `L u_max sqrt(2 l_p) + l_p (L + 1) (1-γ^H)/(1-γ) r_max`
pub fn max_forecast_error_bound(
    weight_norm_cap: f64,
    window: usize,
    u_max: f64,
    gamma: f64,
    horizon: usize,
    r_max: f64,
) -> f64 {
    let (l, lp) = (weight_norm_cap, window as f64);
    l * u_max * (2.0 * lp).sqrt() + lp * (l + 1.0) * value_scale(gamma, horizon) * r_max
}

/// `(|S||A|)^3.3 / ((1-γ)^5.2 ε^2.6)`
pub fn sample_complexity_threshold(num_states: usize, num_actions: usize, gamma: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::arg(format!("accuracy {eps} must be positive")));
    }
    if !(gamma > 0.0 && gamma < 1.0) || num_states == 0 || num_actions == 0 {
        return Err(Error::arg("need |S|, |A| >= 1 and gamma in (0, 1)"));
    }
    let sa = (num_states * num_actions) as f64;
    Ok(sa.powf(3.3) / ((1.0 - gamma).powf(5.2) * eps.powf(2.6)))
}

/// Whether the ticks elapsed before interval `m` (0-based) give every snapshot
/// of a `window`-long history enough samples:
/// `t_m - j + 1 >= threshold(u_{t_m - j + 1})` for `j = 1..=window`.
/// `u_values` is indexed by tick; missing or zero entries fail the check.
pub fn schedule_satisfies_complexity(
    schedule: &UpdateSchedule,
    m: usize,
    window: usize,
    u_values: &[f64],
    num_states: usize,
    num_actions: usize,
    gamma: f64,
) -> bool {
    if m >= schedule.entries.len() {
        return false;
    }
    let elapsed: usize = schedule.entries[..m].iter().map(|e| e.g + e.n).sum();
    (1..=window).all(|j| {
        let Some(count) = (elapsed + 1).checked_sub(j) else {
            return false;
        };
        let Some(&u) = u_values.get(count) else {
            return false;
        };
        match sample_complexity_threshold(num_states, num_actions, gamma, u) {
            Ok(th) => count as f64 >= th,
            Err(_) => false,
        }
    })
}

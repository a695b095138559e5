//! Value-gap bounds between two frozen MDPs and the inexact NPG convergence bound.

use crate::{Error, Result};

fn geometric(gamma: f64, terms: usize) -> f64 {
    (1.0 - gamma.powi(terms as i32)) / (1.0 - gamma)
}

/// `Σ_{h'=h}^{H-1} γ^{h'-h} (B_r + r_max/(1-γ) B_p)`, bounding `|Q*_{t1,h} - Q*_{t2,h}|`.
pub fn optimal_q_gap_bound(budgets: (f64, f64), gamma: f64, horizon: usize, r_max: f64, h: usize) -> Result<f64> {
    if h >= horizon {
        return Err(Error::arg(format!("step {h} outside horizon {horizon}")));
    }
    Ok(geometric(gamma, horizon - h) * (budgets.0 + r_max / (1.0 - gamma) * budgets.1))
}

/// `(1-γ^H)/(1-γ) (B_r + r_max/(1-γ) B_p)`, bounding `|V*_{t1} - V*_{t2}|`.
pub fn optimal_v_gap_bound(budgets: (f64, f64), gamma: f64, horizon: usize, r_max: f64) -> f64 {
    geometric(gamma, horizon) * (budgets.0 + r_max / (1.0 - gamma) * budgets.1)
}

/// `(1-γ^H)/(1-γ) B_r + r_max γ/(1-γ) ((1-γ^H)/(1-γ) - γ^{H-1} H) B_p`, bounding
/// `|V^π_{t1} - V^π_{t2}|` for one policy.
///
/// The transition term is the occupancy-measure drift `Σ_h h γ^h B_p` times the
/// largest reward, so it scales with `r_max`; with `r_max = 1` this is the
/// unscaled form.
pub fn same_policy_v_gap_bound(budgets: (f64, f64), gamma: f64, horizon: usize, r_max: f64) -> f64 {
    let scale = geometric(gamma, horizon);
    let drift = gamma / (1.0 - gamma) * (scale - gamma.powi(horizon as i32 - 1) * horizon as f64);
    scale * budgets.0 + r_max * drift * budgets.1
}

/// `(γ+2)(1-ητ)^{g-1} C' + 2(γ+2)/(1-γ) (1 + γ/(ητ)) ε_f + 2τ ln|A|/(1-γ)`
pub fn npg_convergence_bound(
    g: usize,
    c_prime: f64,
    eps_f: f64,
    gamma: f64,
    eta: f64,
    tau: f64,
    action_count: usize,
) -> Result<f64> {
    if g == 0 {
        return Err(Error::arg("iteration count g starts at 1"));
    }
    let x = eta * tau;
    Ok((gamma + 2.0) * (1.0 - x).powi(g as i32 - 1) * c_prime
        + 2.0 * (gamma + 2.0) / (1.0 - gamma) * (1.0 + gamma / x) * eps_f
        + 2.0 * tau * (action_count as f64).ln() / (1.0 - gamma))
}

//! Update/hold split solvers over one interval of length `Δ = G + N`.
//!
//! Both solvers search every integer `N ∈ [0, Δ]` and keep the lowest `N`
//! among minimisers, where values within [`TIE_TOL`] (relative, with an
//! absolute floor of the same size) count as equal. The closed forms and stationarity residuals are reported
//! next to the search result as diagnostics only.

use crate::mdp::{span_cumulative_budget, TimeVaryingMdp};
use crate::{Error, Result};

/// One interval's split problem with envelope parameters `(α_i, B_i^max)`:
/// index 1 refers to the update span, 2 to the hold span.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitProblem {
    pub delta: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub b1max: f64,
    pub b2max: f64,
    pub c1: f64,
    /// Weight `C4 + C5` of the envelope. Zero is accepted so that a sweep can
    /// switch the environment term off entirely.
    pub c4_plus_c5: f64,
    pub eta: f64,
    pub tau: f64,
}

impl SplitProblem {
    pub fn validate(&self) -> Result<()> {
        if self.delta == 0 {
            return Err(Error::arg("delta must be at least 1"));
        }
        if !(self.alpha1 > 1.0 && self.alpha2 > 1.0 && self.alpha1.is_finite() && self.alpha2.is_finite()) {
            return Err(Error::arg(format!("growth rates must exceed 1, got {} and {}", self.alpha1, self.alpha2)));
        }
        if !(self.b1max > 0.0 && self.b2max > 0.0) {
            return Err(Error::arg("B^max values must be positive"));
        }
        if !(self.c1 >= 0.0 && self.c4_plus_c5 >= 0.0) {
            return Err(Error::arg("C1 and C4 + C5 must be nonnegative"));
        }
        let x = self.eta * self.tau;
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::arg(format!("eta * tau = {x} outside (0, 1)")));
        }
        Ok(())
    }

    fn q(&self) -> f64 {
        1.0 - self.eta * self.tau
    }
}

fn k(alpha: f64) -> f64 {
    alpha.ln() / (alpha - 1.0)
}

/// `(C4+C5)((α1^G - 1)/(α1 - 1) B1 + (α2^N - 1)/(α2 - 1) B2)`
pub fn env_regret_envelope(p: &SplitProblem, g: usize, n: usize) -> Result<f64> {
    if !(p.alpha1 > 1.0 && p.alpha2 > 1.0) {
        return Err(Error::arg(format!("growth rates must exceed 1, got {} and {}", p.alpha1, p.alpha2)));
    }
    Ok(envelope(p, g as f64, n as f64))
}

fn envelope(p: &SplitProblem, g: f64, n: f64) -> f64 {
    p.c4_plus_c5
        * ((p.alpha1.powf(g) - 1.0) / (p.alpha1 - 1.0) * p.b1max
            + (p.alpha2.powf(n) - 1.0) / (p.alpha2 - 1.0) * p.b2max)
}

/// `C1/ητ + (N C1 - C1/ητ)(1-ητ)^G`
pub fn policy_regret_term(p: &SplitProblem, g: usize, n: usize) -> f64 {
    let x = p.eta * p.tau;
    p.c1 / x + (n as f64 * p.c1 - p.c1 / x) * p.q().powi(g as i32)
}

/// Objective of [`optimal_split_total`]: policy term plus envelope.
pub fn total_split_objective(p: &SplitProblem, g: usize, n: usize) -> f64 {
    policy_regret_term(p, g, n) + envelope(p, g as f64, n as f64)
}

/// Tie tolerance of the split search.
///
/// The policy term alone takes the same value at `N = 0` and `N = 1`, so with
/// near-zero budgets the choice between them would otherwise be made by the
/// budgets' last few significant digits.
pub const TIE_TOL: f64 = 1e-9;

/// True when `v` beats `best` by more than the tie tolerance.
pub fn strictly_below(v: f64, best: f64) -> bool {
    v < best - TIE_TOL * best.abs().max(1.0)
}

fn argmin_n(delta: usize, f: impl Fn(usize, usize) -> f64) -> (usize, f64) {
    let mut best = (0, f(delta, 0));
    for n in 1..=delta {
        let v = f(delta - n, n);
        if strictly_below(v, best.1) {
            best = (n, v);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvSplit {
    pub g_star: usize,
    pub n_star: usize,
    pub value: f64,
    /// `ln((k1/k2) α1^Δ B1/B2) / ln(α2/α1)` with `k = ln α/(α - 1)`; `None` when `α1 = α2`.
    pub closed_form_n: Option<f64>,
    /// Root of the envelope's first-order condition, `ln((k1/k2) α1^Δ B1/B2) / ln(α1 α2)`.
    pub first_order_n: f64,
}

pub fn optimal_split_env(p: &SplitProblem) -> Result<EnvSplit> {
    p.validate()?;
    let (n_star, value) = argmin_n(p.delta, |g, n| envelope(p, g as f64, n as f64));
    let num = (k(p.alpha1) / k(p.alpha2) * p.b1max / p.b2max).ln() + p.delta as f64 * p.alpha1.ln();
    let closed_form_n = (p.alpha1 != p.alpha2).then(|| num / (p.alpha2 / p.alpha1).ln());
    Ok(EnvSplit {
        g_star: p.delta - n_star,
        n_star,
        value,
        closed_form_n,
        first_order_n: num / (p.alpha1 * p.alpha2).ln(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TotalSplit {
    pub g_star: usize,
    pub n_star: usize,
    pub objective: f64,
    /// `|stationarity_expression(G*, N*)|`
    pub residual: f64,
}

/// The stationarity expression as stated for the combined objective,
/// `C1((N-1) ln q - 1) q^G + (C4+C5)(k1 B1 α1^G - k2 B2 α2^N)` with `q = 1 - ητ`.
pub fn stationarity_expression(p: &SplitProblem, g: f64, n: f64) -> f64 {
    let q = p.q();
    p.c1 * ((n - 1.0) * q.ln() - 1.0) * q.powf(g) + env_slope(p, g, n)
}

/// Exact derivative of the combined objective along `G = Δ - N`, taken with
/// respect to `G`: `C1 q^G (N ln q - ln q/ητ - 1) + (C4+C5)(k1 B1 α1^G - k2 B2 α2^N)`.
pub fn objective_slope(p: &SplitProblem, g: f64, n: f64) -> f64 {
    let q = p.q();
    let x = p.eta * p.tau;
    p.c1 * q.powf(g) * (n * q.ln() - q.ln() / x - 1.0) + env_slope(p, g, n)
}

fn env_slope(p: &SplitProblem, g: f64, n: f64) -> f64 {
    p.c4_plus_c5 * (k(p.alpha1) * p.b1max * p.alpha1.powf(g) - k(p.alpha2) * p.b2max * p.alpha2.powf(n))
}

pub fn optimal_split_total(p: &SplitProblem) -> Result<TotalSplit> {
    p.validate()?;
    let (n_star, objective) = argmin_n(p.delta, |g, n| total_split_objective(p, g, n));
    let g_star = p.delta - n_star;
    Ok(TotalSplit {
        g_star,
        n_star,
        objective,
        residual: stationarity_expression(p, g_star as f64, n_star as f64).abs(),
    })
}

/// Without drift every tick should update: `(Δ, 0)`.
pub fn stationary_optimal_split(delta: usize) -> (usize, usize) {
    (delta, 0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorSplit {
    /// Some `0 < G < Δ` is strictly below both boundary splits.
    pub exists: bool,
    pub g_star: usize,
    pub n_star: usize,
    pub value: f64,
}

/// Evaluates `C4 B̄_r + C5 B̄_p` of the update span plus the same of the hold
/// span for every integer split of `[t_m, t_{m+1}]` on the actual timeline.
pub fn interior_minimizer_exists(
    mdp: &TimeVaryingMdp,
    t_m: usize,
    t_mp1: usize,
    c4: f64,
    c5: f64,
) -> Result<InteriorSplit> {
    if t_mp1 < t_m + 2 {
        return Err(Error::arg(format!("interval [{t_m}, {t_mp1}] is shorter than 2")));
    }
    mdp.check_time(t_mp1)?;
    let delta = t_mp1 - t_m;
    let mut values = Vec::with_capacity(delta + 1);
    for g in 0..=delta {
        let (ur, up) = span_cumulative_budget(mdp, t_m, t_m + g)?;
        let (hr, hp) = span_cumulative_budget(mdp, t_m + g, t_mp1)?;
        values.push(c4 * (ur + hr) + c5 * (up + hp));
    }
    let (n_star, value) = argmin_n(delta, |g, _| values[g]);
    let boundary = values[0].min(values[delta]);
    let exists = values[1..delta].iter().any(|&v| v < boundary);
    Ok(InteriorSplit { exists, g_star: delta - n_star, n_star, value })
}

/// Mean over ticks of `R^env / (R^env + R^π)`, skipping ticks whose
/// denominator is not positive.
pub fn dominant_ratio(r_env: &[f64], r_pi: &[f64]) -> Result<f64> {
    if r_env.len() != r_pi.len() {
        return Err(Error::arg("traces differ in length"));
    }
    let ratios: Vec<f64> = r_env.iter().zip(r_pi).filter(|(e, p)| *e + *p > 0.0).map(|(e, p)| e / (e + p)).collect();
    if ratios.is_empty() {
        return Err(Error::arg("no tick with a positive combined bound"));
    }
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

//! Local and cumulative variation budgets.
//!
//! Tables only change at segment starts, so the per-tick variation between
//! `t` and `t + 1` is nonzero only when `t + 1` is a change-point `c`.
//! Consequently
//!
//! ```text
//! B(t1, t2)  = Σ_{c ∈ (t1, t2]}   d_c
//! B̄(t1, t2) = Σ_{c ∈ (t1, t2-1]} d_c · (t2 - c)
//! ```
//!
//! where `d_c` is the variation across change-point `c`.

use super::{TimeVaryingMdp, STATIONARY_TOL};
use crate::{Error, Result};

/// Budgets of one interval `[t1, t2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationBudgetReport {
    pub b_r: f64,
    pub b_p: f64,
    pub cumulative_b_r: f64,
    pub cumulative_b_p: f64,
    pub interval: (usize, usize),
}

/// `(c, ΔR, ΔP)` for every change-point with `lo < c <= hi`.
fn changes(mdp: &TimeVaryingMdp, lo: usize, hi: usize) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
    mdp.segments()
        .windows(2)
        .filter(move |w| w[1].start > lo && w[1].start <= hi)
        .map(|w| (w[1].start, w[1].tables.reward_gap(&w[0].tables), w[1].tables.transition_gap(&w[0].tables)))
}

fn check_interval(mdp: &TimeVaryingMdp, t1: usize, t2: usize) -> Result<()> {
    if t1 >= t2 {
        return Err(Error::arg(format!("interval requires t1 < t2, got ({t1}, {t2})")));
    }
    mdp.check_time(t2)
}

/// `(B_r, B_p)` over `[t1, t2]`; zero for empty spans `t1 >= t2`.
pub fn span_local_budget(mdp: &TimeVaryingMdp, t1: usize, t2: usize) -> Result<(f64, f64)> {
    mdp.check_time(t2.max(t1))?;
    Ok(changes(mdp, t1, t2).fold((0.0, 0.0), |(r, p), (_, dr, dp)| (r + dr, p + dp)))
}

/// `(B̄_r, B̄_p)` over `[t1, t2]`; zero for empty spans `t1 >= t2`.
pub fn span_cumulative_budget(mdp: &TimeVaryingMdp, t1: usize, t2: usize) -> Result<(f64, f64)> {
    mdp.check_time(t2.max(t1))?;
    if t2 == 0 {
        return Ok((0.0, 0.0));
    }
    Ok(changes(mdp, t1, t2 - 1).fold((0.0, 0.0), |(r, p), (c, dr, dp)| {
        let w = (t2 - c) as f64;
        (r + w * dr, p + w * dp)
    }))
}

/// `(B̄_r(t1, t2), B̄_p(t1, t2))`.
pub fn cumulative_budget(mdp: &TimeVaryingMdp, t1: usize, t2: usize) -> Result<(f64, f64)> {
    check_interval(mdp, t1, t2)?;
    span_cumulative_budget(mdp, t1, t2)
}

pub fn local_budget(mdp: &TimeVaryingMdp, t1: usize, t2: usize) -> Result<VariationBudgetReport> {
    check_interval(mdp, t1, t2)?;
    let (b_r, b_p) = span_local_budget(mdp, t1, t2)?;
    let (cumulative_b_r, cumulative_b_p) = span_cumulative_budget(mdp, t1, t2)?;
    Ok(VariationBudgetReport { b_r, b_p, cumulative_b_r, cumulative_b_p, interval: (t1, t2) })
}

/// True iff both local budgets vanish on `[t1, t2]`.
pub fn is_stationary(mdp: &TimeVaryingMdp, t1: usize, t2: usize) -> Result<bool> {
    let r = local_budget(mdp, t1, t2)?;
    Ok(r.b_r <= STATIONARY_TOL && r.b_p <= STATIONARY_TOL)
}

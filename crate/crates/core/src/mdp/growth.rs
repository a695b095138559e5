//! Exponential envelopes `B(t1, t) <= b_max * alpha^(t - t1)` for budget series.

use crate::{Error, Result};

const GRID_MIN: f64 = 1.0 + 1e-6;
const GRID_MAX: f64 = 8.0;
const GRID_POINTS: usize = 512;
const B_MAX_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetGrowthParams {
    pub alpha: f64,
    pub b_max: f64,
}

impl BudgetGrowthParams {
    /// `b_max * alpha^offset`
    pub fn envelope(&self, offset: usize) -> f64 {
        self.b_max * self.alpha.powi(offset as i32)
    }

    /// Envelope on cumulative budgets derived from the local one:
    /// `Σ_{j<n} b_max α^j <= (b_max / (α - 1)) α^n`.
    pub fn cumulative_params(&self) -> BudgetGrowthParams {
        BudgetGrowthParams { alpha: self.alpha, b_max: self.b_max / (self.alpha - 1.0) }
    }

    /// `b_max Σ_{j=0}^{n-1} α^j`
    pub fn summed_envelope(&self, n: usize) -> f64 {
        self.b_max * (self.alpha.powi(n as i32) - 1.0) / (self.alpha - 1.0)
    }
}

/// The 512 log-spaced candidate growth rates in `[1 + 1e-6, 8]`.
pub fn growth_grid() -> Vec<f64> {
    let (lo, hi) = (GRID_MIN.ln(), GRID_MAX.ln());
    (0..GRID_POINTS).map(|i| (lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64).exp()).collect()
}

/// Fits `(alpha, b_max)` to `(offset, budget)` points.
///
/// Any alpha admits an envelope once `b_max = max_i B_i / alpha^{o_i}`, so the
/// grid point chosen is the one giving the tightest envelope, measured as the
/// summed envelope height over the supplied offsets. Ties go to the smaller
/// alpha.
pub fn fit_growth_params(series: &[(usize, f64)]) -> Result<BudgetGrowthParams> {
    if series.is_empty() {
        return Err(Error::arg("budget series is empty"));
    }
    if let Some((_, b)) = series.iter().find(|(_, b)| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::arg(format!("budget value {b} is not a nonnegative number")));
    }
    if series.iter().all(|(_, b)| *b == 0.0) {
        return Ok(BudgetGrowthParams { alpha: GRID_MIN, b_max: B_MAX_FLOOR });
    }
    let mut best: Option<(f64, BudgetGrowthParams)> = None;
    for alpha in growth_grid() {
        let b_max = series.iter().map(|&(o, b)| b / alpha.powi(o as i32)).fold(0.0, f64::max).max(B_MAX_FLOOR);
        let p = BudgetGrowthParams { alpha, b_max };
        let cost: f64 = series.iter().map(|&(o, _)| p.envelope(o)).sum();
        if best.is_none_or(|(c, _)| cost < c * (1.0 - 1e-12)) {
            best = Some((cost, p));
        }
    }
    Ok(best.unwrap().1)
}

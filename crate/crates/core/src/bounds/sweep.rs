//! Bound curves over `N ∈ [0, Δ]` while one split-problem parameter varies.

use std::fmt::Write as _;

use super::split::{
    env_regret_envelope, optimal_split_env, optimal_split_total, policy_regret_term, stationarity_expression,
    total_split_objective, SplitProblem,
};
use crate::{fmt_f64, Error, Result};

pub const ALPHA_RATIO_GRID: [f64; 5] = [0.98, 0.99, 1.0, 1.01, 1.02];
pub const BUDGET_RATIO_GRID: [f64; 5] = [0.94, 0.97, 1.0, 1.03, 1.06];
pub const LEARNING_RATE_GRID: [f64; 5] = [0.01, 0.1, 0.3, 0.7, 0.99];
pub const DOMINANT_RATIO_GRID: [f64; 4] = [0.0, 0.86, 0.92, 0.95];

pub const SWEEP_CSV_HEADER: &str = "param_name,param_value,N,bound_value,is_argmin";
pub const SOLVER_CSV_HEADER: &str = "G_star,N_star,objective,closed_form_N,residual";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepObjective {
    /// Envelope only.
    EnvOnly,
    /// Policy term plus envelope.
    EnvPlusPi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    /// `α1 / α2`, with `α2` held at the baseline.
    AlphaRatio,
    /// `B1^max / B2^max`, with `B2^max` held at the baseline.
    BudgetRatio,
    /// `η`, with `τ` held at the baseline.
    LearningRate,
    /// Target share of the envelope in the combined bound at the symmetric
    /// split, reached by rescaling `C1`. Zero switches the envelope off and
    /// keeps `C1` at 1.
    DominantRatio,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] =
        [SweepParam::AlphaRatio, SweepParam::BudgetRatio, SweepParam::LearningRate, SweepParam::DominantRatio];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::AlphaRatio => "alpha_ratio",
            SweepParam::BudgetRatio => "budget_ratio",
            SweepParam::LearningRate => "learning_rate",
            SweepParam::DominantRatio => "dominant_ratio",
        }
    }

    pub fn from_name(s: &str) -> Option<SweepParam> {
        SweepParam::ALL.into_iter().find(|p| p.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub objective: SweepObjective,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub baseline: SplitProblem,
}

/// `α = 1.05`, `Δ = 50`, unit budgets and envelope weight, `η = 0.1`, `τ = 1`, `C1 = 0`.
pub fn sweep_baseline() -> SplitProblem {
    SplitProblem {
        delta: 50,
        alpha1: 1.05,
        alpha2: 1.05,
        b1max: 1.0,
        b2max: 1.0,
        c1: 0.0,
        c4_plus_c5: 1.0,
        eta: 0.1,
        tau: 1.0,
    }
}

/// The four standard grids around [`sweep_baseline`]. The learning-rate sweep
/// uses `C1 = 100` so that the policy term matters.
pub fn standard_sweeps() -> Vec<SweepSpec> {
    let base = sweep_baseline();
    vec![
        SweepSpec {
            objective: SweepObjective::EnvOnly,
            param: SweepParam::AlphaRatio,
            values: ALPHA_RATIO_GRID.to_vec(),
            baseline: base,
        },
        SweepSpec {
            objective: SweepObjective::EnvOnly,
            param: SweepParam::BudgetRatio,
            values: BUDGET_RATIO_GRID.to_vec(),
            baseline: base,
        },
        SweepSpec {
            objective: SweepObjective::EnvPlusPi,
            param: SweepParam::LearningRate,
            values: LEARNING_RATE_GRID.to_vec(),
            baseline: SplitProblem { c1: 100.0, ..base },
        },
        SweepSpec {
            objective: SweepObjective::EnvPlusPi,
            param: SweepParam::DominantRatio,
            values: DOMINANT_RATIO_GRID.to_vec(),
            baseline: base,
        },
    ]
}

/// The split problem at one parameter value.
pub fn realize(spec: &SweepSpec, value: f64) -> Result<SplitProblem> {
    let b = spec.baseline;
    let p = match spec.param {
        SweepParam::AlphaRatio => SplitProblem { alpha1: value * b.alpha2, ..b },
        SweepParam::BudgetRatio => SplitProblem { b1max: value * b.b2max, ..b },
        SweepParam::LearningRate => SplitProblem { eta: value, ..b },
        SweepParam::DominantRatio => {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::arg(format!("dominant ratio {value} outside [0, 1]")));
            }
            if value == 0.0 {
                SplitProblem { c1: 1.0, c4_plus_c5: 0.0, ..b }
            } else {
                let n = b.delta / 2;
                let g = b.delta - n;
                let env = env_regret_envelope(&b, g, n)?;
                let per_c1 = policy_regret_term(&SplitProblem { c1: 1.0, ..b }, g, n);
                SplitProblem { c1: env * (1.0 - value) / (value * per_c1), ..b }
            }
        }
    };
    p.validate()?;
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub param_value: f64,
    pub problem: SplitProblem,
    /// Bound value at each `N = 0..=Δ`.
    pub curve: Vec<f64>,
    pub n_star: usize,
}

pub fn sweep_point(spec: &SweepSpec, value: f64) -> Result<SweepPoint> {
    let p = realize(spec, value)?;
    let curve = (0..=p.delta)
        .map(|n| match spec.objective {
            SweepObjective::EnvOnly => env_regret_envelope(&p, p.delta - n, n),
            SweepObjective::EnvPlusPi => Ok(total_split_objective(&p, p.delta - n, n)),
        })
        .collect::<Result<Vec<_>>>()?;
    let n_star = match spec.objective {
        SweepObjective::EnvOnly => optimal_split_env(&p)?.n_star,
        SweepObjective::EnvPlusPi => optimal_split_total(&p)?.n_star,
    };
    Ok(SweepPoint { param_value: value, problem: p, curve, n_star })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub param: SweepParam,
    pub points: Vec<SweepPoint>,
}

impl SweepTable {
    pub fn n_stars(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.n_star).collect()
    }

    /// Rows `param_name,param_value,N,bound_value,is_argmin` without a header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for pt in &self.points {
            for (n, v) in pt.curve.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{n},{},{}",
                    self.param.name(),
                    fmt_f64(pt.param_value),
                    fmt_f64(*v),
                    u8::from(n == pt.n_star)
                );
            }
        }
        out
    }
}

pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.values.is_empty() {
        return Err(Error::arg("sweep value list is empty"));
    }
    let points = spec.values.iter().map(|&v| sweep_point(spec, v)).collect::<Result<_>>()?;
    Ok(SweepTable { param: spec.param, points })
}

/// Grid answer plus diagnostics for one split problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitReport {
    pub g_star: usize,
    pub n_star: usize,
    pub objective: f64,
    pub closed_form_n: Option<f64>,
    pub residual: f64,
}

impl SplitReport {
    /// `G_star,N_star,objective,closed_form_N,residual`; an undefined closed form prints as `NaN`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.g_star,
            self.n_star,
            fmt_f64(self.objective),
            fmt_f64(self.closed_form_n.unwrap_or(f64::NAN)),
            fmt_f64(self.residual)
        )
    }
}

pub fn split_report(objective: SweepObjective, p: &SplitProblem) -> Result<SplitReport> {
    let env = optimal_split_env(p)?;
    Ok(match objective {
        SweepObjective::EnvOnly => SplitReport {
            g_star: env.g_star,
            n_star: env.n_star,
            objective: env.value,
            closed_form_n: env.closed_form_n,
            residual: stationarity_expression(&SplitProblem { c1: 0.0, ..*p }, env.g_star as f64, env.n_star as f64)
                .abs(),
        },
        SweepObjective::EnvPlusPi => {
            let t = optimal_split_total(p)?;
            SplitReport {
                g_star: t.g_star,
                n_star: t.n_star,
                objective: t.objective,
                closed_form_n: env.closed_form_n,
                residual: t.residual,
            }
        }
    })
}

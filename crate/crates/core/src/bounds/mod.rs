//! Regret upper bounds, value-gap bounds and update/hold split solvers.

mod gaps;
mod regret;
mod split;
mod sweep;

pub use gaps::{npg_convergence_bound, optimal_q_gap_bound, optimal_v_gap_bound, same_policy_v_gap_bound};
pub use regret::{
    c1_from_gaps, constants_from, hold_regret_bound, interval_budgets, total_regret_bound, update_regret_bound,
    BoundConstants, IntervalBudgets, RegretBoundParts,
};
pub use split::{
    dominant_ratio, env_regret_envelope, interior_minimizer_exists, objective_slope, optimal_split_env,
    optimal_split_total, policy_regret_term, stationarity_expression, stationary_optimal_split, strictly_below,
    total_split_objective, EnvSplit, InteriorSplit, SplitProblem, TotalSplit, TIE_TOL,
};
pub use sweep::{
    realize, split_report, standard_sweeps, sweep, sweep_baseline, sweep_point, SplitReport, SweepObjective,
    SweepParam, SweepPoint, SweepSpec, SweepTable, ALPHA_RATIO_GRID, BUDGET_RATIO_GRID, DOMINANT_RATIO_GRID,
    LEARNING_RATE_GRID, SOLVER_CSV_HEADER, SWEEP_CSV_HEADER,
};

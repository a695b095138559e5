//! Experiment drivers shared by the CLI and the acceptance tests.

mod bandit;
mod cliff;

pub use bandit::{run_bandit, BanditStep, BetaSchedule};
pub use cliff::{
    cliff_csv_rows, recovery_summary, run_cliffworld, CliffMethod, CliffRunConfig, RecoverySummary, ALPHA_EPSILON_GRID,
    CLIFF_CSV_HEADER, FORECAST_SNAPSHOT_EVERY, FORECAST_WINDOW,
};

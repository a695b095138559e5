//! Forecasting online reinforcement learning for non-stationary tabular MDPs.
//!
//! The crate is organised bottom-up:
//!
//! * [`mdp`]: time-elapsing tabular MDPs, exact finite-horizon dynamic
//!   programming, variation budgets and exponential envelope fitting.
//! * [`environments`]: goal-switching cliffworld, switching bandit and a
//!   seeded drift-MDP generator.
//! * [`forecast`]: least-squares future-Q forecasting and forecasting-error
//!   bound calculators.
//! * [`learner`]: entropy-regularised NPG updates and tabular Q-learning.
//! * [`scheduler`]: update/hold schedules, the forecasting online RL loop and
//!   dynamic-regret traces.
//! * [`bounds`]: regret upper bounds, value-gap bounds, update/hold split
//!   solvers and parameter sweeps.
//! * [`experiments`] and [`verify`]: the cliffworld / bandit experiments and
//!   the randomized bound-domination suites driven by the CLI.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod environments;
mod error;
pub mod experiments;
pub mod forecast;
pub mod learner;
pub mod mdp;
pub mod scheduler;
pub mod seeding;
pub mod verify;

pub use error::{Error, Result};

/// Shortest round-trip decimal rendering used for every CSV number.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

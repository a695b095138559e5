//! Non-stationary test environments.

mod bandit;
mod cliffworld;
mod drift;

pub use bandit::{make_switch_bandit, SwitchBanditSpec};
pub use cliffworld::{
    make_cliffworld, Cell, CliffAction, CliffworldSpec, FIRST_GOAL, HEIGHT, SECOND_GOAL, START, WIDTH,
};
pub(crate) use drift::random_simplex;
pub use drift::{make_drift_mdp, DriftEvent, DriftMdpSpec, DriftTarget, R_MAX};

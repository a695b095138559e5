//! Goal-switching cliffworld.
//!
//! A 12 x 3 grid. The agent starts at `(0, 2)`; the goal is `(11, 2)` until
//! `switch_step` environment steps have elapsed and `(11, 0)` afterwards.
//! Cells `(1..=10, 0)` and `(1..=10, 2)` send the agent back to the start with
//! the failure reward. `y` grows downwards, so `Up` decreases `y`.

use crate::mdp::{MdpTables, Segment, TimeVaryingMdp};
use crate::{Error, Result};

pub const WIDTH: usize = 12;
pub const HEIGHT: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Cell { x, y }
    }

    pub fn index(self) -> usize {
        self.y * WIDTH + self.x
    }

    pub fn from_index(i: usize) -> Self {
        Cell { x: i % WIDTH, y: i / WIDTH }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffAction {
    Up,
    Left,
    Right,
    Down,
}

impl CliffAction {
    pub const ALL: [CliffAction; 4] = [CliffAction::Up, CliffAction::Left, CliffAction::Right, CliffAction::Down];

    pub fn from_index(a: usize) -> Self {
        Self::ALL[a]
    }
}

pub const START: Cell = Cell::new(0, 2);
pub const FIRST_GOAL: Cell = Cell::new(11, 2);
pub const SECOND_GOAL: Cell = Cell::new(11, 0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CliffworldSpec {
    pub success_reward: f64,
    pub failure_reward: f64,
    pub step_reward: f64,
    /// Environment step at which the goal moves; `0` means the second goal from the start.
    pub switch_step: usize,
    pub total_steps: usize,
    pub max_episode_steps: usize,
    pub discount: f64,
}

impl Default for CliffworldSpec {
    fn default() -> Self {
        CliffworldSpec {
            success_reward: 100.0,
            failure_reward: -100.0,
            step_reward: -1.0,
            switch_step: 10_000,
            total_steps: 20_000,
            max_episode_steps: 100,
            discount: 0.99,
        }
    }
}

/// Outcome of one move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CliffStep {
    pub reward: f64,
    pub next: Cell,
    /// The move ended in the active goal.
    pub terminal: bool,
}

impl CliffworldSpec {
    pub fn num_states(&self) -> usize {
        WIDTH * HEIGHT
    }

    pub fn active_goal(&self, env_step: usize) -> Cell {
        if env_step < self.switch_step {
            FIRST_GOAL
        } else {
            SECOND_GOAL
        }
    }

    pub fn is_restart(cell: Cell) -> bool {
        (1..=10).contains(&cell.x) && (cell.y == 0 || cell.y == 2)
    }

    fn validate(&self) -> Result<()> {
        if self.max_episode_steps == 0 || self.total_steps == 0 {
            return Err(Error::arg("episode length and total steps must be positive"));
        }
        if self.switch_step > self.total_steps {
            return Err(Error::arg("switch step beyond total steps"));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::arg("discount must lie in (0, 1)"));
        }
        if ![self.success_reward, self.failure_reward, self.step_reward].iter().all(|r| r.is_finite()) {
            return Err(Error::arg("rewards must be finite"));
        }
        Ok(())
    }

    /// Moves from `cell` with `goal` active. The active goal absorbs with zero reward.
    pub fn step_with_goal(&self, goal: Cell, cell: Cell, action: CliffAction) -> CliffStep {
        if cell == goal {
            return CliffStep { reward: 0.0, next: cell, terminal: true };
        }
        let (x, y) = (cell.x as isize, cell.y as isize);
        let (nx, ny) = match action {
            CliffAction::Up => (x, y - 1),
            CliffAction::Left => (x - 1, y),
            CliffAction::Right => (x + 1, y),
            CliffAction::Down => (x, y + 1),
        };
        let next = if (0..WIDTH as isize).contains(&nx) && (0..HEIGHT as isize).contains(&ny) {
            Cell::new(nx as usize, ny as usize)
        } else {
            cell
        };
        if next == goal {
            CliffStep { reward: self.success_reward, next, terminal: true }
        } else if Self::is_restart(next) {
            CliffStep { reward: self.failure_reward, next: START, terminal: false }
        } else {
            CliffStep { reward: self.step_reward, next, terminal: false }
        }
    }

    pub fn step(&self, env_step: usize, cell: Cell, action: CliffAction) -> CliffStep {
        self.step_with_goal(self.active_goal(env_step), cell, action)
    }

    fn tables(&self, goal: Cell) -> Result<MdpTables> {
        let (ns, na) = (self.num_states(), CliffAction::ALL.len());
        let mut rewards = Vec::with_capacity(ns * na);
        let mut transitions = vec![0.0; ns * na * ns];
        for s in 0..ns {
            for (a, &action) in CliffAction::ALL.iter().enumerate() {
                let out = self.step_with_goal(goal, Cell::from_index(s), action);
                rewards.push(out.reward);
                transitions[(s * na + a) * ns + out.next.index()] = 1.0;
            }
        }
        MdpTables::new(ns, na, rewards, transitions)
    }
}

/// The cliffworld as a time-elapsing MDP whose ticks are environment steps.
pub fn make_cliffworld(spec: &CliffworldSpec) -> Result<TimeVaryingMdp> {
    spec.validate()?;
    let mut segments = Vec::new();
    if spec.switch_step > 0 {
        segments.push(Segment { start: 0, tables: spec.tables(FIRST_GOAL)? });
    }
    segments.push(Segment { start: spec.switch_step, tables: spec.tables(SECOND_GOAL)? });
    let mut init = vec![0.0; spec.num_states()];
    init[START.index()] = 1.0;
    TimeVaryingMdp::new(spec.max_episode_steps, spec.discount, spec.total_steps, init, segments)
}

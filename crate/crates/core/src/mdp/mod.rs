//! Time-elapsing tabular MDPs.
//!
//! An episode at tick `t` runs entirely inside the frozen MDP `M_t`. The
//! timeline is stored as a list of change-points, each carrying a full set of
//! reward and transition tables that stay in force until the next change-point.

mod budget;
mod dp;
mod growth;
mod text;

pub use budget::{
    cumulative_budget, is_stationary, local_budget, span_cumulative_budget, span_local_budget, VariationBudgetReport,
};
pub use dp::{
    evaluate_tables, exact_evaluate, optimal_q_by_step, optimal_tables, optimal_values, rollout, soft_optimal_values,
    Trajectory, Transition,
};
pub use growth::{fit_growth_params, growth_grid, BudgetGrowthParams};
pub use text::{read_timeline, write_timeline};

use crate::{Error, Result};

/// Smallest probability any stored policy entry may take.
pub const POLICY_FLOOR: f64 = 1e-12;
/// Tolerance on probability-vector sums.
pub const PROB_TOL: f64 = 1e-9;
/// Tolerance used when deciding that a variation budget is exactly zero.
pub const STATIONARY_TOL: f64 = 1e-12;

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    let mut sum = 0.0;
    for &x in p {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::model(format!("{what}: entry {x} is not a probability")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::model(format!("{what}: sums to {sum}")));
    }
    Ok(())
}

/// Rewards and transitions of one frozen MDP, stored row-major by `(s, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MdpTables {
    num_states: usize,
    num_actions: usize,
    rewards: Vec<f64>,
    transitions: Vec<f64>,
}

impl MdpTables {
    pub fn new(num_states: usize, num_actions: usize, rewards: Vec<f64>, transitions: Vec<f64>) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::model("state and action counts must be positive"));
        }
        let sa = num_states * num_actions;
        if rewards.len() != sa {
            return Err(Error::model(format!("expected {sa} rewards, got {}", rewards.len())));
        }
        if transitions.len() != sa * num_states {
            return Err(Error::model(format!(
                "expected {} transition entries, got {}",
                sa * num_states,
                transitions.len()
            )));
        }
        if let Some(r) = rewards.iter().find(|r| !r.is_finite()) {
            return Err(Error::model(format!("non-finite reward {r}")));
        }
        for (i, row) in transitions.chunks(num_states).enumerate() {
            let (s, a) = (i / num_actions, i % num_actions);
            check_distribution(row, &format!("transition row (s={s}, a={a})"))?;
        }
        Ok(MdpTables { num_states, num_actions, rewards, transitions })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.rewards[s * self.num_actions + a]
    }

    pub fn transition(&self, s: usize, a: usize) -> &[f64] {
        let n = self.num_states;
        let start = (s * self.num_actions + a) * n;
        &self.transitions[start..start + n]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn transitions(&self) -> &[f64] {
        &self.transitions
    }

    pub fn max_abs_reward(&self) -> f64 {
        self.rewards.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `max_{s,a} |R'(s,a) - R(s,a)|`
    pub fn reward_gap(&self, other: &MdpTables) -> f64 {
        self.rewards.iter().zip(&other.rewards).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max_{s,a} ||P'(.|s,a) - P(.|s,a)||_1`
    pub fn transition_gap(&self, other: &MdpTables) -> f64 {
        self.transitions
            .chunks(self.num_states)
            .zip(other.transitions.chunks(other.num_states))
            .map(|(p, q)| p.iter().zip(q).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Same tables with every reward multiplied by `k`.
    pub fn scale_rewards(&self, k: f64) -> MdpTables {
        MdpTables { rewards: self.rewards.iter().map(|r| r * k).collect(), ..self.clone() }
    }
}

/// Tables that take effect at tick `start` and hold until the next change-point.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub tables: MdpTables,
}

/// The family `{M_t}` for integer ticks `t ∈ [0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeVaryingMdp {
    num_states: usize,
    num_actions: usize,
    horizon: usize,
    discount: f64,
    total_time: usize,
    initial_dist: Vec<f64>,
    segments: Vec<Segment>,
    r_max: f64,
}

impl TimeVaryingMdp {
    pub fn new(
        horizon: usize,
        discount: f64,
        total_time: usize,
        initial_dist: Vec<f64>,
        segments: Vec<Segment>,
    ) -> Result<Self> {
        let first = segments.first().ok_or_else(|| Error::model("timeline has no segments"))?;
        if first.start != 0 {
            return Err(Error::model("first segment must start at t = 0"));
        }
        let (num_states, num_actions) = (first.tables.num_states, first.tables.num_actions);
        if horizon == 0 {
            return Err(Error::model("horizon must be positive"));
        }
        if total_time == 0 {
            return Err(Error::model("total time must be positive"));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::model(format!("discount {discount} outside (0, 1)")));
        }
        if initial_dist.len() != num_states {
            return Err(Error::model("initial distribution length differs from state count"));
        }
        check_distribution(&initial_dist, "initial distribution")?;
        for w in segments.windows(2) {
            if w[1].start <= w[0].start {
                return Err(Error::model("segment starts must be strictly increasing"));
            }
        }
        for seg in &segments {
            if seg.start > total_time {
                return Err(Error::model(format!("segment start {} beyond total time {total_time}", seg.start)));
            }
            if seg.tables.num_states != num_states || seg.tables.num_actions != num_actions {
                return Err(Error::model("segments disagree on state/action counts"));
            }
        }
        let r_max = segments.iter().map(|s| s.tables.max_abs_reward()).fold(0.0, f64::max);
        Ok(TimeVaryingMdp { num_states, num_actions, horizon, discount, total_time, initial_dist, segments, r_max })
    }

    /// A timeline with a single segment.
    pub fn stationary(
        horizon: usize,
        discount: f64,
        total_time: usize,
        initial_dist: Vec<f64>,
        tables: MdpTables,
    ) -> Result<Self> {
        Self::new(horizon, discount, total_time, initial_dist, vec![Segment { start: 0, tables }])
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn total_time(&self) -> usize {
        self.total_time
    }

    pub fn initial_dist(&self) -> &[f64] {
        &self.initial_dist
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// `(1 - γ^H) / (1 - γ)`, the largest possible discounted step count.
    pub fn value_scale(&self) -> f64 {
        (1.0 - self.discount.powi(self.horizon as i32)) / (1.0 - self.discount)
    }

    pub fn check_time(&self, t: usize) -> Result<()> {
        if t > self.total_time {
            Err(Error::TimeOutOfRange { t, total: self.total_time })
        } else {
            Ok(())
        }
    }

    pub(crate) fn segment_index(&self, t: usize) -> usize {
        self.segments.partition_point(|s| s.start <= t) - 1
    }

    /// The frozen tables of `M_t`.
    pub fn tables_at(&self, t: usize) -> Result<&MdpTables> {
        self.check_time(t)?;
        Ok(&self.segments[self.segment_index(t)].tables)
    }

    pub fn reward(&self, t: usize, s: usize, a: usize) -> Result<f64> {
        Ok(self.tables_at(t)?.reward(s, a))
    }

    pub fn transition(&self, t: usize, s: usize, a: usize) -> Result<&[f64]> {
        Ok(self.tables_at(t)?.transition(s, a))
    }

    /// Same timeline with every reward multiplied by `k`.
    pub fn scale_rewards(&self, k: f64) -> TimeVaryingMdp {
        let segments =
            self.segments.iter().map(|s| Segment { start: s.start, tables: s.tables.scale_rewards(k) }).collect();
        TimeVaryingMdp { segments, r_max: self.r_max * k.abs(), ..self.clone() }
    }

    /// Initial-distribution average of a value table.
    pub fn average_value(&self, v: &ValueTable) -> f64 {
        self.initial_dist.iter().zip(&v.values).map(|(p, x)| p * x).sum()
    }
}

/// Stochastic stationary policy `π(a|s)`, with every entry at least [`POLICY_FLOOR`].
#[derive(Clone, Debug, PartialEq)]
pub struct TabularPolicy {
    num_states: usize,
    num_actions: usize,
    probs: Vec<f64>,
}

impl TabularPolicy {
    /// Validates the rows as given; entries below the floor are rejected.
    pub fn new(num_states: usize, num_actions: usize, probs: Vec<f64>) -> Result<Self> {
        if num_states == 0 || num_actions == 0 || probs.len() != num_states * num_actions {
            return Err(Error::model("policy shape mismatch"));
        }
        for (s, row) in probs.chunks(num_actions).enumerate() {
            check_distribution(row, &format!("policy row {s}"))?;
            if let Some(p) = row.iter().find(|&&p| p < POLICY_FLOOR) {
                return Err(Error::model(format!("policy row {s} has entry {p} below the floor")));
            }
        }
        Ok(TabularPolicy { num_states, num_actions, probs })
    }

    /// Normalises arbitrary nonnegative row weights, then applies the floor.
    pub fn from_weights_floored(num_states: usize, num_actions: usize, weights: Vec<f64>) -> Result<Self> {
        if num_states == 0 || num_actions == 0 || weights.len() != num_states * num_actions {
            return Err(Error::model("policy shape mismatch"));
        }
        let mut probs = weights;
        for row in probs.chunks_mut(num_actions) {
            let total: f64 = row.iter().sum();
            if !(total.is_finite() && total > 0.0) || row.iter().any(|w| *w < 0.0) {
                return Err(Error::model("policy weights must be nonnegative with a positive sum"));
            }
            row.iter_mut().for_each(|w| *w /= total);
            apply_floor(row);
        }
        Ok(TabularPolicy { num_states, num_actions, probs })
    }

    /// Row-wise softmax of unnormalised log-weights, computed with max subtraction.
    pub fn from_logits(num_states: usize, num_actions: usize, logits: &[f64]) -> Result<Self> {
        if logits.len() != num_states * num_actions {
            return Err(Error::model("policy shape mismatch"));
        }
        if logits.iter().any(|x| x.is_nan()) {
            return Err(Error::model("NaN logit"));
        }
        let mut probs = Vec::with_capacity(logits.len());
        for row in logits.chunks(num_actions) {
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let start = probs.len();
            probs.extend(row.iter().map(|x| (x - m).exp()));
            let out = &mut probs[start..];
            let z: f64 = out.iter().sum();
            out.iter_mut().for_each(|p| *p /= z);
            apply_floor(out);
        }
        Ok(TabularPolicy { num_states, num_actions, probs })
    }

    pub fn uniform(num_states: usize, num_actions: usize) -> Self {
        TabularPolicy { num_states, num_actions, probs: vec![1.0 / num_actions as f64; num_states * num_actions] }
    }

    /// Deterministic greedy policy on `q` (lowest action index wins ties), floored.
    pub fn greedy(q: &QTable) -> Self {
        let (ns, na) = (q.num_states, q.num_actions);
        let mut probs = vec![0.0; ns * na];
        for s in 0..ns {
            probs[s * na + q.argmax(s)] = 1.0;
            apply_floor(&mut probs[s * na..(s + 1) * na]);
        }
        TabularPolicy { num_states: ns, num_actions: na, probs }
    }

    /// `π(a|s) ∝ exp(q(s,a) / τ)`.
    pub fn softmax(q: &QTable, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::arg(format!("temperature {tau} must be positive")));
        }
        let logits: Vec<f64> = q.values.iter().map(|x| x / tau).collect();
        Self::from_logits(q.num_states, q.num_actions, &logits)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s * self.num_actions + a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.probs[s * self.num_actions..(s + 1) * self.num_actions]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sup_distance(&self, other: &TabularPolicy) -> f64 {
        sup_diff(&self.probs, &other.probs)
    }

    /// `||log π - log π'||_∞`
    pub fn log_sup_distance(&self, other: &TabularPolicy) -> f64 {
        self.probs.iter().zip(&other.probs).fold(0.0, |m, (a, b)| m.max((a.ln() - b.ln()).abs()))
    }
}

/// Raises entries below the floor and takes the excess mass from the largest entry.
fn apply_floor(row: &mut [f64]) {
    let mut excess = 0.0;
    for p in row.iter_mut() {
        if *p < POLICY_FLOOR {
            excess += POLICY_FLOOR - *p;
            *p = POLICY_FLOOR;
        }
    }
    if excess > 0.0 {
        let imax = argmax_lowest(row);
        row[imax] -= excess;
    }
}

fn argmax_lowest(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = i;
        }
    }
    best
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// State-action value table.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    num_states: usize,
    num_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(num_states: usize, num_actions: usize) -> Self {
        QTable { num_states, num_actions, values: vec![0.0; num_states * num_actions] }
    }

    pub fn from_vec(num_states: usize, num_actions: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != num_states * num_actions {
            return Err(Error::model("Q table shape mismatch"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::model("Q table entries must be finite"));
        }
        Ok(QTable { num_states, num_actions, values })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.num_actions + a]
    }

    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        self.values[s * self.num_actions + a] = v;
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.num_actions..(s + 1) * self.num_actions]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self, s: usize) -> f64 {
        self.row(s).iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action with lowest-index tie-breaking.
    pub fn argmax(&self, s: usize) -> usize {
        argmax_lowest(self.row(s))
    }

    pub fn sup_distance(&self, other: &QTable) -> f64 {
        sup_diff(&self.values, &other.values)
    }

    pub fn same_shape(&self, other: &QTable) -> bool {
        self.num_states == other.num_states && self.num_actions == other.num_actions
    }
}

/// State value table.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTable {
    pub values: Vec<f64>,
}

impl ValueTable {
    pub fn get(&self, s: usize) -> f64 {
        self.values[s]
    }

    pub fn sup_distance(&self, other: &ValueTable) -> f64 {
        sup_diff(&self.values, &other.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_tables(r: f64) -> MdpTables {
        MdpTables::new(2, 1, vec![r, 0.0], vec![0.5, 0.5, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn rejects_bad_transition_rows() {
        let err = MdpTables::new(2, 1, vec![0.0, 0.0], vec![0.5, 0.6, 1.0, 0.0]);
        assert!(err.is_err());
        let err = MdpTables::new(2, 1, vec![0.0, 0.0], vec![1.5, -0.5, 1.0, 0.0]);
        assert!(err.is_err());
    }

    #[test]
    fn timeline_lookup_and_range() {
        let segs = vec![
            Segment { start: 0, tables: two_state_tables(0.0) },
            Segment { start: 3, tables: two_state_tables(2.0) },
        ];
        let mdp = TimeVaryingMdp::new(2, 0.9, 5, vec![1.0, 0.0], segs).unwrap();
        assert_eq!(mdp.reward(2, 0, 0).unwrap(), 0.0);
        assert_eq!(mdp.reward(3, 0, 0).unwrap(), 2.0);
        assert_eq!(mdp.reward(5, 0, 0).unwrap(), 2.0);
        assert!(matches!(mdp.reward(6, 0, 0), Err(Error::TimeOutOfRange { t: 6, total: 5 })));
        assert_eq!(mdp.r_max(), 2.0);
    }

    #[test]
    fn timeline_rejects_unsorted_or_late_segments() {
        let segs = vec![
            Segment { start: 0, tables: two_state_tables(0.0) },
            Segment { start: 9, tables: two_state_tables(1.0) },
        ];
        assert!(TimeVaryingMdp::new(2, 0.9, 5, vec![1.0, 0.0], segs).is_err());
        let segs = vec![Segment { start: 1, tables: two_state_tables(0.0) }];
        assert!(TimeVaryingMdp::new(2, 0.9, 5, vec![1.0, 0.0], segs).is_err());
    }

    #[test]
    fn greedy_policy_respects_floor_and_ties() {
        let q = QTable::from_vec(1, 3, vec![1.0, 2.0, 2.0]).unwrap();
        let pi = TabularPolicy::greedy(&q);
        assert!(pi.prob(0, 1) > 0.99);
        assert_eq!(pi.prob(0, 0), POLICY_FLOOR);
        assert_eq!(pi.prob(0, 2), POLICY_FLOOR);
        assert!((pi.row(0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        TabularPolicy::new(1, 3, pi.probs().to_vec()).unwrap();
    }

    #[test]
    fn policy_validation() {
        assert!(TabularPolicy::new(1, 2, vec![1.0, 0.0]).is_err());
        assert!(TabularPolicy::new(1, 2, vec![0.6, 0.6]).is_err());
        let p = TabularPolicy::from_weights_floored(1, 2, vec![3.0, 0.0]).unwrap();
        assert_eq!(p.prob(0, 1), POLICY_FLOOR);
    }

    #[test]
    fn softmax_handles_large_logits() {
        let q = QTable::from_vec(1, 2, vec![1e6, 0.0]).unwrap();
        let pi = TabularPolicy::softmax(&q, 1e-3).unwrap();
        assert!(pi.prob(0, 0) > 0.999);
        assert!(pi.probs().iter().all(|p| p.is_finite() && *p >= POLICY_FLOOR));
    }
}

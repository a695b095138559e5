use crate::mdp::{MdpTables, Segment, TimeVaryingMdp};
use crate::{Error, Result};

/// Two-armed bandit whose arm rewards swap once.
///
/// Before `switch_time` arm 1 pays 1 and arm 0 pays 0; from `switch_time`
/// onwards the rewards are swapped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchBanditSpec {
    pub total_time: usize,
    pub switch_time: usize,
}

// Irrelevant with a one-step horizon, but the model requires one.
const BANDIT_DISCOUNT: f64 = 0.5;

pub fn make_switch_bandit(spec: &SwitchBanditSpec) -> Result<TimeVaryingMdp> {
    if !(spec.switch_time > 0 && spec.switch_time < spec.total_time) {
        return Err(Error::arg(format!(
            "switch time {} must lie strictly inside (0, {})",
            spec.switch_time, spec.total_time
        )));
    }
    let arms = |r0: f64, r1: f64| MdpTables::new(1, 2, vec![r0, r1], vec![1.0, 1.0]);
    TimeVaryingMdp::new(
        1,
        BANDIT_DISCOUNT,
        spec.total_time,
        vec![1.0],
        vec![
            Segment { start: 0, tables: arms(0.0, 1.0)? },
            Segment { start: spec.switch_time, tables: arms(1.0, 0.0)? },
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{local_budget, optimal_values};

    #[test]
    fn rewards_swap_at_switch() {
        let mdp = make_switch_bandit(&SwitchBanditSpec { total_time: 10, switch_time: 4 }).unwrap();
        assert_eq!(mdp.horizon(), 1);
        assert_eq!(mdp.reward(3, 0, 1).unwrap(), 1.0);
        assert_eq!(mdp.reward(3, 0, 0).unwrap(), 0.0);
        assert_eq!(mdp.reward(4, 0, 0).unwrap(), 1.0);
        let (_, q, _) = optimal_values(&mdp, 7).unwrap();
        assert_eq!(q.argmax(0), 0);
        assert_eq!(local_budget(&mdp, 0, 10).unwrap().b_r, 1.0);
    }

    #[test]
    fn switch_must_be_interior() {
        for switch_time in [0, 10, 11] {
            assert!(make_switch_bandit(&SwitchBanditSpec { total_time: 10, switch_time }).is_err());
        }
    }
}

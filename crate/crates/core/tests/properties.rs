use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::Rng;

use pauserl::forecast::{fit_forecaster, forecast_q, Basis};
use pauserl::learner::{npg_entropy_update, NpgConfig};
use pauserl::mdp::{
    exact_evaluate, optimal_values, rollout, soft_optimal_values, span_cumulative_budget, span_local_budget, MdpTables,
    QTable, Segment, TabularPolicy, TimeVaryingMdp,
};
use pauserl::scheduler::{schedule_from_blocks, validate_schedule, SchedulePolicyParams};
use pauserl::seeding::run_rng;

fn random_tables<R: Rng>(ns: usize, na: usize, rng: &mut R) -> MdpTables {
    let rewards = (0..ns * na).map(|_| rng.random_range(-1.0..1.0)).collect();
    let transitions = (0..ns * na)
        .flat_map(|_| {
            let row: Vec<f64> = (0..ns).map(|_| rng.random_range(0.01..1.0)).collect();
            let z: f64 = row.iter().sum();
            row.into_iter().map(move |p| p / z)
        })
        .collect();
    MdpTables::new(ns, na, rewards, transitions).unwrap()
}

fn random_policy<R: Rng>(ns: usize, na: usize, rng: &mut R) -> TabularPolicy {
    let logits: Vec<f64> = (0..ns * na).map(|_| rng.random_range(-2.0..2.0)).collect();
    TabularPolicy::from_logits(ns, na, &logits).unwrap()
}

/// Value of a step-dependent deterministic policy, by direct recursion.
fn markov_value(tables: &MdpTables, gamma: f64, actions: &[Vec<usize>], h: usize, s: usize) -> f64 {
    if h == actions.len() {
        return 0.0;
    }
    let a = actions[h][s];
    let next: f64 = tables
        .transition(s, a)
        .iter()
        .enumerate()
        .map(|(s2, p)| p * markov_value(tables, gamma, actions, h + 1, s2))
        .sum();
    tables.reward(s, a) + gamma * next
}

/// All maps `state -> action`.
fn decision_rules(ns: usize, na: usize) -> Vec<Vec<usize>> {
    (0..na.pow(ns as u32))
        .map(|mut code| {
            (0..ns)
                .map(|_| {
                    let a = code % na;
                    code /= na;
                    a
                })
                .collect()
        })
        .collect()
}

#[test]
fn optimal_value_matches_enumeration_of_markov_policies() {
    let mut rng = run_rng(21, 0);
    for _ in 0..20 {
        let (ns, na, horizon) = (2, 2, 3);
        let tables = random_tables(ns, na, &mut rng);
        let mdp = TimeVaryingMdp::stationary(horizon, 0.8, 5, vec![0.5, 0.5], tables.clone()).unwrap();
        let (v_star, _, _) = optimal_values(&mdp, 0).unwrap();
        let rules = decision_rules(ns, na);
        for s in 0..ns {
            let mut best = f64::NEG_INFINITY;
            for r0 in &rules {
                for r1 in &rules {
                    for r2 in &rules {
                        let plan = vec![r0.clone(), r1.clone(), r2.clone()];
                        best = best.max(markov_value(&tables, 0.8, &plan, 0, s));
                    }
                }
            }
            assert_abs_diff_eq!(v_star.values[s], best, epsilon = 1e-12);
        }
    }
}

#[test]
fn exact_evaluation_matches_monte_carlo() {
    let mut rng = run_rng(22, 0);
    let tables = random_tables(3, 2, &mut rng);
    let gamma = 0.9;
    let mdp = TimeVaryingMdp::stationary(4, gamma, 5, vec![0.2, 0.3, 0.5], tables).unwrap();
    let pi = random_policy(3, 2, &mut rng);
    let exact = mdp.average_value(&exact_evaluate(&mdp, 0, &pi).unwrap().0);
    let n = 40_000;
    let returns: Vec<f64> = (0..n)
        .map(|_| {
            let traj = rollout(&mdp, 0, &pi, &mut rng).unwrap();
            traj.transitions.iter().enumerate().map(|(h, tr)| gamma.powi(h as i32) * tr.reward).sum()
        })
        .collect();
    let mean = returns.iter().sum::<f64>() / n as f64;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - exact).abs() < 5.0 * se, "mc {mean} exact {exact} se {se}");
}

#[test]
fn soft_optimum_approaches_hard_optimum() {
    let mut rng = run_rng(23, 0);
    let tables = random_tables(3, 3, &mut rng);
    let (gamma, horizon) = (0.9, 5);
    let mdp = TimeVaryingMdp::stationary(horizon, gamma, 5, vec![1.0, 0.0, 0.0], tables).unwrap();
    let (v_star, _, _) = optimal_values(&mdp, 0).unwrap();
    let discount_sum: f64 = (0..horizon).map(|h| gamma.powi(h as i32)).sum();
    let mut last = f64::INFINITY;
    for tau in [1.0, 0.3, 0.1, 0.01, 1e-4] {
        let (v_soft, _, _) = soft_optimal_values(&mdp, 0, tau).unwrap();
        let gap = (0..3).map(|s| v_soft.values[s] - v_star.values[s]).fold(0.0, f64::max);
        // Log-sum-exp exceeds the max by at most τ ln|A| per step.
        assert!(gap >= -1e-12 && gap <= tau * 3f64.ln() * discount_sum + 1e-12);
        assert!(gap <= last + 1e-12);
        last = gap;
    }
    assert!(last < 1e-3);
}

#[test]
fn budgets_match_a_per_tick_sum() {
    let mut rng = run_rng(24, 0);
    let segments: Vec<Segment> =
        [0, 3, 4, 9].iter().map(|&start| Segment { start, tables: random_tables(2, 2, &mut rng) }).collect();
    let mdp = TimeVaryingMdp::new(2, 0.5, 12, vec![0.5, 0.5], segments).unwrap();
    let tick_gap = |t: usize| {
        let (a, b) = (mdp.tables_at(t).unwrap(), mdp.tables_at(t + 1).unwrap());
        (b.reward_gap(a), b.transition_gap(a))
    };
    for t1 in 0..12 {
        for t2 in t1 + 1..=12 {
            let (mut r, mut p, mut cr, mut cp) = (0.0, 0.0, 0.0, 0.0);
            for t in t1..t2 {
                let (dr, dp) = tick_gap(t);
                r += dr;
                p += dp;
                // Variation entering at tick t + 1 is felt by every later tick up to t2.
                let w = (t2 - (t + 1)) as f64;
                cr += w * dr;
                cp += w * dp;
            }
            let (lr, lp) = span_local_budget(&mdp, t1, t2).unwrap();
            let (br, bp) = span_cumulative_budget(&mdp, t1, t2).unwrap();
            assert_abs_diff_eq!(lr, r, epsilon = 1e-12);
            assert_abs_diff_eq!(lp, p, epsilon = 1e-12);
            assert_abs_diff_eq!(br, cr, epsilon = 1e-12);
            assert_abs_diff_eq!(bp, cp, epsilon = 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn npg_update_is_a_distribution_and_keeps_softmax_fixed(
        q in proptest::collection::vec(-5.0f64..5.0, 6),
        probs in proptest::collection::vec(0.05f64..1.0, 6),
        eta_frac in 0.05f64..1.0,
        tau in 0.05f64..2.0,
        gamma in 0.1f64..0.95,
    ) {
        let eta = eta_frac * (1.0 - gamma) / tau;
        let cfg = NpgConfig { eta, tau, gamma };
        let q = QTable::from_vec(2, 3, q).unwrap();
        let rows: Vec<f64> = probs.chunks(3).flat_map(|r| {
            let z: f64 = r.iter().sum();
            r.iter().map(move |p| p / z).collect::<Vec<_>>()
        }).collect();
        let pi = TabularPolicy::new(2, 3, rows).unwrap();
        let next = npg_entropy_update(&pi, &q, &cfg).unwrap();
        for s in 0..2 {
            let total: f64 = next.row(s).iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(next.row(s).iter().all(|&p| p > 0.0));
        }
        let fixed = TabularPolicy::softmax(&q, tau).unwrap();
        prop_assert!(npg_entropy_update(&fixed, &q, &cfg).unwrap().sup_distance(&fixed) < 1e-9);
    }

    #[test]
    fn linear_histories_are_extrapolated_exactly(
        slope in proptest::collection::vec(-1.0f64..1.0, 4),
        offset in proptest::collection::vec(-10.0f64..10.0, 4),
        window in 2usize..6,
        step in 1usize..50,
    ) {
        let at = |t: f64| QTable::from_vec(2, 2, (0..4).map(|k| offset[k] + slope[k] * t).collect()).unwrap();
        let history: Vec<(f64, QTable)> = (0..window).map(|i| ((i * step) as f64, at((i * step) as f64))).collect();
        let model = fit_forecaster(&history, Basis::Identity, window).unwrap();
        let target = (window * step) as f64;
        prop_assert!(forecast_q(&model, target).sup_distance(&at(target)) < 1e-5);
    }

    #[test]
    fn block_schedules_tile_the_horizon(
        block_len in 1usize..30,
        tenths in 1u32..=10,
        total_time in 1usize..300,
    ) {
        let params = SchedulePolicyParams { block_len, update_fraction: tenths as f64 / 10.0 };
        let s = schedule_from_blocks(&params, total_time).unwrap();
        prop_assert!(validate_schedule(&s, total_time));
        prop_assert_eq!(s.end(), total_time);
        prop_assert!(s.entries.iter().all(|e| e.g + e.n <= block_len));
    }
}

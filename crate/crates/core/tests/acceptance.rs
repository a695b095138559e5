//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::Instant;

use pauserl::bounds::{
    env_regret_envelope, optimal_split_env, optimal_split_total, standard_sweeps, sweep, total_split_objective,
    SplitProblem,
};
use pauserl::environments::CliffworldSpec;
use pauserl::experiments::{recovery_summary, run_cliffworld, CliffMethod, CliffRunConfig, ALPHA_EPSILON_GRID};
use pauserl::learner::{epsilon_greedy, npg_entropy_update, q_learning_step, NpgConfig, QLearnConfig};
use pauserl::mdp::{optimal_tables, MdpTables, QTable, TabularPolicy, Transition};
use pauserl::seeding::run_rng;
use pauserl::verify::{forecast_suite, gap_suite, regret_suite, SuiteConfig};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

const CLIFF_SEEDS: u64 = 5;

fn cliffworld_recovery() -> Outcome {
    let spec = CliffworldSpec { switch_step: 10_000, total_steps: 20_000, ..Default::default() };
    let mut jobs = Vec::new();
    for (k, &(alpha, epsilon)) in ALPHA_EPSILON_GRID.iter().enumerate() {
        for seed in 0..CLIFF_SEEDS {
            for method in [CliffMethod::Forecast, CliffMethod::Reactive] {
                jobs.push((CliffRunConfig::new(spec, method, alpha, epsilon), seed, k as u64));
            }
        }
    }
    let runs: Vec<(CliffMethod, Vec<f64>)> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(cfg, seed, k)| s.spawn(move || (cfg.method, run_cliffworld(cfg, &mut run_rng(*seed, *k)).unwrap())))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let pick = |m: CliffMethod| runs.iter().filter(|r| r.0 == m).map(|r| r.1.clone()).collect::<Vec<_>>();
    let s = recovery_summary(&pick(CliffMethod::Forecast), &pick(CliffMethod::Reactive), 6000..10_000, 16_000..20_000)
        .unwrap();
    outcome(
        s.recovers(),
        format!(
            "forecast pre {:.3} post {:.3}, reactive pre {:.3} post {:.3}; need forecast_post - reactive_post >= 0.5 * (forecast_pre - reactive_post) > 0",
            s.forecast_pre, s.forecast_post, s.reactive_pre, s.reactive_post
        ),
    )
}

fn suite_outcome(report: pauserl::Result<pauserl::verify::SuiteReport>) -> Outcome {
    match report {
        Ok(r) => outcome(r.passed(), r.summary()),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

/// Sums the geometric series term by term instead of using closed forms.
fn reference_objective(p: &SplitProblem, g: usize, n: usize, with_policy: bool) -> f64 {
    let series = |alpha: f64, len: usize| (0..len).map(|j| alpha.powi(j as i32)).sum::<f64>();
    let env = p.c4_plus_c5 * (series(p.alpha1, g) * p.b1max + series(p.alpha2, n) * p.b2max);
    if !with_policy {
        return env;
    }
    let x = p.eta * p.tau;
    let mut contraction = 1.0;
    for _ in 0..g {
        contraction *= 1.0 - x;
    }
    // Update ticks telescope to (C1/ητ)(1 - q^G); hold ticks pay C1 q^G each.
    let update: f64 = (0..g).map(|i| p.c1 * (1.0 - x).powi(i as i32)).sum();
    env + update + n as f64 * p.c1 * contraction
}

/// Lowest `N` whose value is within the tie tolerance of the global minimum.
fn reference_argmin(p: &SplitProblem, with_policy: bool) -> (usize, f64) {
    let values: Vec<f64> = (0..=p.delta).map(|n| reference_objective(p, p.delta - n, n, with_policy)).collect();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let n = values.iter().position(|&v| v <= min + 1e-9 * min.abs().max(1.0)).unwrap();
    (n, values[n])
}

fn split_solvers() -> Outcome {
    let mut rng = run_rng(5, 0);
    let mut mismatches = Vec::new();
    for i in 0..100 {
        let p = SplitProblem {
            delta: rng.random_range(1..=60),
            alpha1: rng.random_range(1.001..1.4),
            alpha2: rng.random_range(1.001..1.4),
            b1max: rng.random_range(0.05..5.0),
            b2max: rng.random_range(0.05..5.0),
            c1: if i % 4 == 0 { 0.0 } else { rng.random_range(0.0..50.0) },
            c4_plus_c5: rng.random_range(0.1..5.0),
            eta: rng.random_range(0.01..0.99),
            tau: 1.0,
        };
        let env = optimal_split_env(&p).unwrap();
        let total = optimal_split_total(&p).unwrap();
        let (n_env, v_env) = reference_argmin(&p, false);
        let (n_tot, v_tot) = reference_argmin(&p, true);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        if env.n_star != n_env || !close(env.value, v_env) || total.n_star != n_tot || !close(total.objective, v_tot) {
            mismatches.push(i);
        }
    }
    let p = SplitProblem {
        delta: 10,
        alpha1: 1.1,
        alpha2: 1.05,
        b1max: 1.0,
        b2max: 1.0,
        c1: 0.0,
        c4_plus_c5: 1.0,
        eta: 0.1,
        tau: 1.0,
    };
    let e = optimal_split_env(&p).unwrap();
    let env_ok = e.n_star == 6 && (e.value - 11.443).abs() <= 1e-3;
    let q = SplitProblem { alpha2: 1.1, c1: 1.0, ..p };
    let t = optimal_split_total(&q).unwrap();
    let tot_ok = (t.g_star, t.n_star) == (6, 4) && (t.objective - 19.168).abs() <= 1e-3;
    let extra = (total_split_objective(&q, 6, 4) - 19.168).abs() <= 1e-3
        && (env_regret_envelope(&p, 4, 6).unwrap() - 11.443).abs() <= 1e-3;
    outcome(
        mismatches.is_empty() && env_ok && tot_ok && extra,
        format!(
            "random mismatches {:?}; env example N*={} f={:.4}; total example (G,N)=({},{}) objective {:.4}",
            mismatches, e.n_star, e.value, t.g_star, t.n_star, t.objective
        ),
    )
}

fn sweep_monotonicity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for spec in standard_sweeps() {
        let table = sweep(&spec).unwrap();
        let n = table.n_stars();
        ok &= n.windows(2).all(|w| w[0] <= w[1]);
        parts.push(format!("{} {:?}", spec.param.name(), n));
    }
    outcome(ok, parts.join("; "))
}

fn stationary_reduction() -> Outcome {
    let bad: Vec<usize> = (1..=50)
        .filter(|&delta| {
            let p = SplitProblem {
                delta,
                alpha1: 1.1,
                alpha2: 1.1,
                b1max: 1e-12,
                b2max: 1e-12,
                c1: 1.0,
                c4_plus_c5: 1.0,
                eta: 0.1,
                tau: 1.0,
            };
            optimal_split_total(&p).unwrap().n_star != 0
        })
        .collect();
    outcome(bad.is_empty(), format!("deltas with N* != 0: {bad:?}"))
}

fn learner_suite() -> Outcome {
    let cfg = NpgConfig { eta: 0.5, tau: 0.2, gamma: 0.8 };
    let mut rng = run_rng(8, 0);
    let (ns, na) = (3, 4);
    let q = QTable::from_vec(ns, na, (0..ns * na).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();

    let fixed = TabularPolicy::softmax(&q, cfg.tau).unwrap();
    let fixed_dev = npg_entropy_update(&fixed, &q, &cfg).unwrap().sup_distance(&fixed);

    let pi = TabularPolicy::uniform(ns, na);
    let shifted =
        QTable::from_vec(ns, na, q.values().iter().enumerate().map(|(k, v)| v + [3.0, -7.0, 0.5][k / na]).collect())
            .unwrap();
    let shift_dev =
        npg_entropy_update(&pi, &q, &cfg).unwrap().sup_distance(&npg_entropy_update(&pi, &shifted, &cfg).unwrap());

    let next = npg_entropy_update(&pi, &q, &cfg).unwrap();
    let order_ok = (0..ns)
        .all(|s| (0..na).all(|a| (0..na).all(|b| q.get(s, a) <= q.get(s, b) || next.prob(s, a) > next.prob(s, b))));

    let example = npg_entropy_update(
        &TabularPolicy::uniform(1, 2),
        &QTable::from_vec(1, 2, vec![1.0, 0.0]).unwrap(),
        &NpgConfig { eta: 0.1, tau: 0.1, gamma: 0.9 },
    )
    .unwrap();
    let e = std::f64::consts::E;
    let example_dev = (example.prob(0, 0) - e / (1.0 + e)).abs();

    // Two-state chain: action 0 stays, action 1 moves to the other state.
    let gamma = 0.8;
    let tables = MdpTables::new(2, 2, vec![0.0, 1.0, 2.0, 0.0], vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
    let target = optimal_tables(&tables, gamma, 400).swap_remove(0);
    let ql = QLearnConfig { alpha: 0.5, epsilon: 0.2, gamma };
    let mut learned = QTable::zeros(2, 2);
    for _ in 0..400 {
        for s in 0..2 {
            for a in 0..2 {
                let next = tables.transition(s, a).iter().position(|&p| p == 1.0).unwrap();
                let tr = Transition { state: s, action: a, reward: tables.reward(s, a), next_state: next };
                q_learning_step(&mut learned, &tr, &ql, false).unwrap();
            }
        }
    }
    let q_dev = learned.sup_distance(&target);
    let greedy_ok = (0..2).all(|s| epsilon_greedy(&learned, s, 0.0, &mut rng) == target.argmax(s));

    outcome(
        fixed_dev <= 1e-9 && shift_dev <= 1e-9 && order_ok && example_dev <= 1e-9 && q_dev <= 1e-6 && greedy_ok,
        format!(
            "fixed point {fixed_dev:.1e}, constant shift {shift_dev:.1e}, order {order_ok}, example {example_dev:.1e}, Q-learning {q_dev:.1e}"
        ),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 cliffworld recovery", Box::new(cliffworld_recovery)),
        ("2 value-gap domination", Box::new(|| suite_outcome(gap_suite(&SuiteConfig::new(200, 0))))),
        ("3 forecasting-error soundness", Box::new(|| suite_outcome(forecast_suite(&SuiteConfig::new(100, 0), 10.0)))),
        ("4 dynamic-regret domination", Box::new(|| suite_outcome(regret_suite(&SuiteConfig::new(20, 0))))),
        ("5 split solvers", Box::new(split_solvers)),
        ("6 sweep monotonicity", Box::new(sweep_monotonicity)),
        ("7 stationary reduction", Box::new(stationary_reduction)),
        ("8 learner invariants", Box::new(learner_suite)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.passed);
        println!(
            "criterion {name}: {} ({:.1}s) {}",
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

mod common;

use common::*;
use nashd_core::experiment::{cell_seed, grid_cells, run_bench, summarize};
use nashd_core::generators::{congestion_game, prisoners_dilemma_n, random_game};
use nashd_core::rng::seeded;
use nashd_core::{
    deviation_payoffs, epsilon, expected_utility, nashd, nashd_subgradient, parse_nfg, serialize_nfg, softmax,
    solve_fictitious_play, solve_regret_matching, zero_sum_extend, BenchPlan, GameClass, LogitProfile,
    NormalFormGame, PureProfile, StrategyProfile,
};
use proptest::prelude::*;
use rand::Rng;

fn random_profile(game: &NormalFormGame, rng: &mut impl Rng) -> StrategyProfile {
    StrategyProfile::new(game.action_counts().iter().map(|&m| random_simplex(rng, m)).collect()).unwrap()
}

fn game_strategy() -> impl Strategy<Value = (Vec<usize>, u64)> {
    (prop::collection::vec(1usize..=4, 1..=3), any::<u64>())
}

fn build(counts: &[usize], seed: u64) -> NormalFormGame {
    let mut rng = seeded(seed);
    NormalFormGame::from_fn("p", counts.to_vec(), |_, _| rng.random_range(-2.0..2.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn contractions_match_enumeration((counts, seed) in game_strategy()) {
        let game = build(&counts, seed);
        let mut rng = seeded(seed ^ 1);
        let sigma = random_profile(&game, &mut rng);
        for i in 0..game.num_players() {
            let u = expected_utility(&game, i, &sigma).unwrap();
            prop_assert!((u - brute_utility(&game, i, sigma.strategies())).abs() < 1e-12);
            let dev = deviation_payoffs(&game, i, &sigma).unwrap();
            for (a, b) in dev.iter().zip(brute_deviations(&game, i, sigma.strategies())) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
        let nd = nashd(&game, &sigma).unwrap();
        prop_assert!((nd - brute_nashd(&game, sigma.strategies()).max(0.0)).abs() < 1e-11);
    }

    #[test]
    fn deviations_ignore_own_strategy((counts, seed) in game_strategy()) {
        let game = build(&counts, seed);
        let mut rng = seeded(seed ^ 2);
        let sigma = random_profile(&game, &mut rng);
        for i in 0..game.num_players() {
            let other = sigma.with_strategy(i, random_simplex(&mut rng, counts[i])).unwrap();
            let a = deviation_payoffs(&game, i, &sigma).unwrap();
            let b = deviation_payoffs(&game, i, &other).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nashd_bounds_exploitability((counts, seed) in game_strategy()) {
        let game = build(&counts, seed);
        let sigma = random_profile(&game, &mut seeded(seed ^ 3));
        let nd = nashd(&game, &sigma).unwrap();
        let eps = epsilon(&game, &sigma).unwrap();
        let n = game.num_players() as f64;
        prop_assert!(nd >= 0.0);
        prop_assert!(eps <= nd + 1e-12);
        prop_assert!(nd <= n * eps + 1e-12);
    }

    #[test]
    fn zero_sum_extension_has_zero_total((counts, seed) in game_strategy()) {
        let game = build(&counts, seed);
        let ext = zero_sum_extend(&game);
        prop_assert_eq!(ext.num_players(), game.num_players() + 1);
        for k in 0..game.size() {
            let total: f64 = ext.payoff_tensors().iter().map(|t| t[k]).sum();
            prop_assert!(total.abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_shift_invariance(z in prop::collection::vec(-5.0f64..5.0, 1..6), c in -50.0f64..50.0) {
        let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
        let a = softmax(&z);
        let b = softmax(&shifted);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in a.iter().zip(brute_softmax(&z)) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn logit_gradient_blocks_sum_to_zero((counts, seed) in game_strategy()) {
        let game = build(&counts, seed);
        let mut rng = seeded(seed ^ 4);
        let z = LogitProfile::random(&game, &mut rng);
        let g = nashd_subgradient(&game, &z).unwrap();
        for block in g.logits() {
            prop_assert!(block.iter().sum::<f64>().abs() < 1e-9);
        }
        let shifted = LogitProfile::new(z.logits().iter().map(|b| b.iter().map(|v| v + 3.0).collect()).collect()).unwrap();
        let nd = nashd(&game, &z.to_profile()).unwrap();
        prop_assert!((nd - nashd(&game, &shifted.to_profile()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn affine_maps_keep_best_responses((counts, seed) in game_strategy(), a in 0.1f64..10.0, b in -10.0f64..10.0) {
        let game = build(&counts, seed);
        let scaled = NormalFormGame::new(
            "s",
            counts.clone(),
            game.payoff_tensors().iter().map(|t| t.iter().map(|v| a * v + b).collect()).collect(),
        )
        .unwrap();
        let sigma = random_profile(&game, &mut seeded(seed ^ 5));
        let argmax = |d: Vec<f64>| d.iter().enumerate().fold(0, |best, (k, v)| if *v > d[best] { k } else { best });
        for i in 0..game.num_players() {
            let d = deviation_payoffs(&game, i, &sigma).unwrap();
            let mut sorted = d.clone();
            sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
            if sorted.len() > 1 && sorted[0] - sorted[1] < 1e-9 {
                continue;
            }
            prop_assert_eq!(argmax(d), argmax(deviation_payoffs(&scaled, i, &sigma).unwrap()));
        }
    }

    #[test]
    fn nfg_round_trip((counts, seed) in game_strategy()) {
        let game = build(&counts, seed);
        let text = serialize_nfg(&game);
        let back = parse_nfg(&text).unwrap();
        prop_assert_eq!(back.action_counts(), game.action_counts());
        prop_assert_eq!(back.payoff_tensors(), game.payoff_tensors());
        prop_assert_eq!(serialize_nfg(&back), text);
    }
}

#[test]
fn utility_matches_enumeration_on_three_player_binary_games() {
    let mut rng = seeded(11);
    for s in 0..100 {
        let game = random_game(3, 2, s).unwrap();
        let sigma = random_profile(&game, &mut rng);
        for i in 0..3 {
            let u = expected_utility(&game, i, &sigma).unwrap();
            assert!((u - brute_utility(&game, i, sigma.strategies())).abs() <= 1e-12);
        }
    }
}

#[test]
fn deviations_equal_one_hot_utilities() {
    let mut rng = seeded(12);
    for s in 0..50 {
        let game = random_game(2, 3, 100 + s).unwrap();
        let sigma = random_profile(&game, &mut rng);
        for i in 0..2 {
            let dev = deviation_payoffs(&game, i, &sigma).unwrap();
            for k in 0..3 {
                let mut e = vec![0.0; 3];
                e[k] = 1.0;
                let u = expected_utility(&game, i, &sigma.with_strategy(i, e).unwrap()).unwrap();
                assert!((dev[k] - u).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn prisoners_dilemma_defection_strictly_dominates() {
    for n in 2..=10 {
        let game = prisoners_dilemma_n(n).unwrap();
        for profile in nashd_core::game::PureProfileIter::new(game.action_counts()) {
            for i in 0..n {
                let mut defect = profile.clone();
                let mut coop = profile.clone();
                defect[i] = 1;
                coop[i] = 0;
                let d = nashd_core::pure_payoff(&game, i, &PureProfile::new(defect)).unwrap();
                let c = nashd_core::pure_payoff(&game, i, &PureProfile::new(coop)).unwrap();
                assert!(d > c, "n={n} player {i}");
            }
        }
        let all_defect = StrategyProfile::pure(&game, &PureProfile::new(vec![1; n])).unwrap();
        assert_eq!(epsilon(&game, &all_defect).unwrap(), 0.0);
    }
}

/// Congestion games are potential games, so sequential pure best responses
/// reach a pure equilibrium.
#[test]
fn congestion_best_response_dynamics_converge() {
    let game = congestion_game(4, 3, 21).unwrap();
    let mut rng = seeded(22);
    for _ in 0..20 {
        let mut a: Vec<usize> = (0..4).map(|_| rng.random_range(0..3)).collect();
        for _ in 0..1000 {
            let mut moved = false;
            for i in 0..4 {
                let sigma = StrategyProfile::pure(&game, &PureProfile::new(a.clone())).unwrap();
                let dev = brute_deviations(&game, i, sigma.strategies());
                let best = (0..3).fold(a[i], |b, k| if dev[k] > dev[b] + 1e-12 { k } else { b });
                if best != a[i] {
                    a[i] = best;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        let sigma = StrategyProfile::pure(&game, &PureProfile::new(a)).unwrap();
        assert_eq!(epsilon(&game, &sigma).unwrap(), 0.0);
    }
}

#[test]
fn regret_matching_improves_on_zero_sum_games() {
    let mut improved = 0;
    for s in 0..100 {
        let base = random_game(2, 4, 300 + s).unwrap();
        let u = base.payoff_tensor(0).to_vec();
        let game = NormalFormGame::new("zs", vec![4, 4], vec![u.clone(), u.iter().map(|v| -v).collect()]).unwrap();
        let short = solve_regret_matching(&game, 100, s).unwrap().epsilon;
        let long = solve_regret_matching(&game, 1000, s).unwrap().epsilon;
        if long <= short {
            improved += 1;
        }
    }
    assert!(improved >= 90, "{improved}/100");
}

#[test]
fn baselines_are_deterministic_simplex_profiles() {
    for s in 0..10 {
        let game = random_game(3, 3, 400 + s).unwrap();
        for solve in [solve_fictitious_play, solve_regret_matching] {
            let a = solve(&game, 200, s).unwrap();
            let b = solve(&game, 200, s).unwrap();
            assert_eq!(a.profile, b.profile);
            assert_eq!(a.epsilon, b.epsilon);
            for strat in a.profile.strategies() {
                assert!(strat.iter().all(|&p| p >= 0.0));
                assert!((strat.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn summary_means_match_records() {
    let (cells, _) = grid_cells(&[GameClass::Random, GameClass::Coordination], &[2, 3], &[2]).unwrap();
    let mut plan = BenchPlan::new(cells);
    plan.seeds_per_cell = 5;
    plan.settings.rounds = 100;
    plan.settings.gd.max_iters = 100;
    let records = run_bench(&plan).unwrap();
    for row in summarize(&records) {
        let values: Vec<f64> = records
            .iter()
            .filter(|r| r.game_class == row.game_class && r.game_size == row.game_size && r.algorithm == row.algorithm)
            .map(|r| r.epsilon)
            .collect();
        assert_eq!(values.len(), row.count);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert!((mean - row.mean_epsilon).abs() <= 1e-12);
    }
}

#[test]
fn cell_seeds_are_stable_and_distinct() {
    let a = cell_seed(0, "random", 2, 10, 0);
    assert_eq!(a, cell_seed(0, "random", 2, 10, 0));
    assert_ne!(a, cell_seed(0, "random", 2, 10, 1));
    assert_ne!(a, cell_seed(1, "random", 2, 10, 0));
    assert_ne!(a, cell_seed(0, "congestion", 2, 10, 0));
}

#[test]
fn finite_differences_agree_away_from_ties() {
    let mut rng = seeded(31);
    let game = random_game(3, 3, 32).unwrap();
    let mut checked = 0;
    while checked < 20 {
        let z = LogitProfile::random(&game, &mut rng);
        if min_argmax_margin(&game, z.to_profile().strategies()) < 1e-3 {
            continue;
        }
        let analytic = nashd_subgradient(&game, &z).unwrap();
        let numeric = finite_difference_gradient(&game, z.logits(), 1e-6);
        for (a, b) in analytic.logits().iter().flatten().zip(numeric.iter().flatten()) {
            assert!((a - b).abs() <= 1e-5 * (1.0 + b.abs()), "{a} vs {b}");
        }
        checked += 1;
    }
}

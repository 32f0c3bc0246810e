mod common;

use std::collections::BTreeSet;

use common::{best_response_oracle, points, set_value_oracle, Keying};
use num_traits::Zero;
use proptest::prelude::*;
use setvalue_core::equilibrium::{
    best_response, equilibria_bruteforce, is_equilibrium, one_step_equilibria, pareto_filter, policy_values,
    set_value_bruteforce, set_value_dpp, strong_pareto_filter, witnesses_bruteforce, Caps, ValueSet,
};
use setvalue_core::game::{Game, Policy, PolicyClass};
use setvalue_core::presets;
use setvalue_core::random::{random_spec, KernelMode, RandomConfig};
use setvalue_core::rational::{int, point, ratio};
use setvalue_core::{Error, Rational};

fn set(items: &[&[(i128, i128)]]) -> BTreeSet<Vec<Rational>> {
    items.iter().map(|p| point(p)).collect()
}

fn zero() -> Rational {
    Rational::zero()
}

fn small_config(kernel: KernelMode, path_dependent: bool) -> RandomConfig {
    RandomConfig {
        horizon: (1, 2),
        kernel,
        path_dependent,
        ..RandomConfig::default()
    }
}

fn static_policy(game: &Game, actions: &[usize]) -> Policy {
    let mut policy = Policy::constant(game.tree(), PolicyClass::PathDependent);
    policy.set(0, game.joint().encode(actions));
    policy
}

#[test]
fn table1_value_and_nash_checks() {
    let game = Game::new(&presets::table1()).unwrap();
    let caps = Caps::default();
    let vs = set_value_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
    assert_eq!(points(&vs), set(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]));

    // (0, 0) costs (0, 1) and is stable; (1, 0) costs (3, 3) and is not.
    let (ok, slack) = is_equilibrium(&game, 0, &static_policy(&game, &[0, 0]), &zero(), PolicyClass::PathDependent, &caps).unwrap();
    assert!(ok);
    assert_eq!(slack, vec![int(0), int(0)]);
    let (ok, slack) = is_equilibrium(&game, 0, &static_policy(&game, &[1, 0]), &zero(), PolicyClass::PathDependent, &caps).unwrap();
    assert!(!ok);
    assert_eq!(slack, vec![int(3), int(3)]);
    // A slack of 3 is tolerated at eps = 3.
    let (ok, _) = is_equilibrium(&game, 0, &static_policy(&game, &[1, 0]), &int(3), PolicyClass::PathDependent, &caps).unwrap();
    assert!(ok);

    let (cost, _) = best_response(&game, 0, &static_policy(&game, &[1, 0]), 0);
    assert_eq!(cost, int(0));
}

#[test]
fn table2_comparison_fails() {
    let caps = Caps::default();
    let left = Game::new(&presets::table2_left()).unwrap();
    let right = Game::new(&presets::table2_right()).unwrap();
    let vl = set_value_bruteforce(&left, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
    let vr = set_value_bruteforce(&right, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
    assert_eq!(points(&vl), set(&[&[(3, 1), (3, 1)]]));
    assert_eq!(points(&vr), set(&[&[(2, 1), (2, 1)]]));
    for j in 0..4 {
        let l = left.payoff(j + 1).unwrap();
        let r = right.payoff(j + 1).unwrap();
        assert!(l.iter().zip(r).all(|(a, b)| a < b));
    }
    // Both play 0 in the left game, which dominates its only equilibrium.
    let strong = strong_pareto_filter(&left, 0, &vl, &caps).unwrap();
    assert!(strong.is_empty());
    assert_eq!(points(&pareto_filter(&vl)), points(&vl));
}

#[test]
fn coordination_example_by_both_engines() {
    let game = Game::new(&presets::example_path()).unwrap();
    let caps = Caps::default();
    let full = set(&[&[(0, 1), (1, 4)], &[(1, 4), (0, 1)], &[(1, 8), (1, 8)]]);
    let state = set(&[&[(0, 1), (1, 4)], &[(1, 4), (0, 1)]]);
    let brute = set_value_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
    assert_eq!(points(&brute), full);
    assert_eq!(points(&set_value_dpp(&game, 0, &caps).unwrap()), full);
    assert_eq!(set_value_oracle(&game, 0, &zero(), Keying::Path), full);
    let sv = set_value_bruteforce(&game, 0, &zero(), PolicyClass::StateDependent, &caps).unwrap();
    assert_eq!(points(&sv), state);
    assert_eq!(set_value_oracle(&game, 0, &zero(), Keying::State), state);

    let (_, records) = witnesses_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
    assert_eq!(records.len(), 3);
    for r in records {
        let (ok, slack) = is_equilibrium(&game, 0, &r.policy, &zero(), PolicyClass::PathDependent, &caps).unwrap();
        assert!(ok);
        assert_eq!(slack, r.slack);
        assert_eq!(game.cost_j(0, &r.policy), r.value);
    }
}

#[test]
fn symmetric_values_are_full_values() {
    let game = Game::new(&presets::example_path()).unwrap();
    let caps = Caps::default();
    let sym = set_value_bruteforce(&game, 0, &zero(), PolicyClass::Symmetric, &caps).unwrap();
    let full = set_value_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
    assert!(sym.is_subset(&full));
    assert!(!sym.is_empty());
}

#[test]
fn one_step_game_with_given_continuations() {
    // The coordination period as a static game: meeting costs 1 each.
    let game = Game::new(&presets::example_path()).unwrap();
    let node = game.tree().node_of(&[0, 0, 0]).unwrap();
    let records = one_step_equilibria(&game, node, &[vec![int(1), int(1)], vec![int(0), int(0)]]).unwrap();
    let values: BTreeSet<_> = records.iter().map(|r| r.value.clone()).collect();
    assert_eq!(values, set(&[&[(0, 1), (1, 4)], &[(1, 4), (0, 1)]]));
    assert!(records.iter().all(|r| r.slack.iter().all(Zero::is_zero)));
    assert!(one_step_equilibria(&game, node, &[vec![int(1), int(1)]]).is_err());
}

#[test]
fn caps_are_enforced() {
    let game = Game::new(&presets::example_state()).unwrap();
    let caps = Caps { policies: 10, selections: 10 };
    assert!(matches!(
        set_value_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps),
        Err(Error::CapExceeded { .. })
    ));
    assert!(matches!(set_value_dpp(&game, 0, &Caps { policies: 10, selections: 1 }), Err(Error::CapExceeded { .. })));
}

#[test]
fn dpp_engine_needs_a_positive_kernel() {
    let game = Game::new(&presets::table1()).unwrap();
    assert!(matches!(set_value_dpp(&game, 0, &Caps::default()), Err(Error::KernelNotPositive(_))));
}

#[test]
fn class_mismatch_is_rejected() {
    let game = Game::new(&presets::example_path()).unwrap();
    let policy = Policy::constant(game.tree(), PolicyClass::PathDependent);
    assert!(matches!(
        is_equilibrium(&game, 0, &policy, &zero(), PolicyClass::Symmetric, &Caps::default()),
        Err(Error::ClassMismatch { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn best_response_matches_enumeration(
        seed in any::<u64>(),
        raw in prop::collection::vec(0usize..4, 16),
    ) {
        let game = Game::new(&random_spec(seed, &small_config(KernelMode::WithZeros, true))).unwrap();
        let tree = game.tree();
        let table: Vec<usize> = (0..tree.node_count()).map(|n| raw[n % raw.len()]).collect();
        let policy = Policy::new(tree, game.joint(), PolicyClass::PathDependent, table.clone()).unwrap();
        for node in (0..tree.node_count()).filter(|&n| !tree.is_leaf(n)) {
            for i in 0..2 {
                let (cost, own) = best_response(&game, node, &policy, i);
                prop_assert_eq!(cost, best_response_oracle(&game, node, &table, i));
                let achieved = policy.deviate(game.joint(), i, &own);
                prop_assert_eq!(game.cost_j(node, &achieved)[i], cost);
            }
        }
    }

    #[test]
    fn set_values_match_enumeration(seed in any::<u64>(), zeros in any::<bool>(), state_keyed in any::<bool>()) {
        let kernel = if zeros { KernelMode::WithZeros } else { KernelMode::Positive };
        let game = Game::new(&random_spec(seed, &small_config(kernel, !state_keyed))).unwrap();
        let caps = Caps::default();
        let full = set_value_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
        prop_assert_eq!(points(&full), set_value_oracle(&game, 0, &zero(), Keying::Path));
        if state_keyed {
            let sv = set_value_bruteforce(&game, 0, &zero(), PolicyClass::StateDependent, &caps).unwrap();
            prop_assert_eq!(points(&sv), set_value_oracle(&game, 0, &zero(), Keying::State));
        }
        if !zeros {
            prop_assert_eq!(points(&set_value_dpp(&game, 0, &caps).unwrap()), points(&full));
        }
        let eps = ratio(1, 2);
        let loose = set_value_bruteforce(&game, 0, &eps, PolicyClass::PathDependent, &caps).unwrap();
        prop_assert_eq!(points(&loose), set_value_oracle(&game, 0, &eps, Keying::Path));
    }

    #[test]
    fn eps_nesting(seed in any::<u64>(), a in 0i128..4, b in 0i128..4) {
        let (small, large) = (ratio(a.min(b), 4), ratio(a.max(b) + 1, 4));
        let game = Game::new(&random_spec(seed, &small_config(KernelMode::WithZeros, true))).unwrap();
        let caps = Caps::default();
        let inner = set_value_bruteforce(&game, 0, &small, PolicyClass::PathDependent, &caps).unwrap();
        let outer = set_value_bruteforce(&game, 0, &large, PolicyClass::PathDependent, &caps).unwrap();
        prop_assert_eq!(outer.epsilon(), &large);
        for p in inner.points() {
            prop_assert!(outer.contains(p));
        }
    }

    #[test]
    fn pareto_filters(seed in any::<u64>()) {
        let game = Game::new(&random_spec(seed, &small_config(KernelMode::WithZeros, true))).unwrap();
        let caps = Caps::default();
        let full = set_value_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
        let pareto = pareto_filter(&full);
        prop_assert_eq!(&pareto_filter(&pareto), &pareto);
        prop_assert_eq!(full.is_empty(), pareto.is_empty());
        prop_assert!(pareto.is_subset(&full));
        let strong = strong_pareto_filter(&game, 0, &full, &caps).unwrap();
        prop_assert!(strong.is_subset(&pareto));
        let all = policy_values(&game, 0, &caps).unwrap();
        prop_assert!(full.is_subset(&all));
        let records = equilibria_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
        let from_records = ValueSet::from_points(records.iter().map(|r| r.value.clone()));
        prop_assert_eq!(points(&from_records), points(&full));
    }

    #[test]
    fn symmetric_subset_on_random_games(seed in any::<u64>()) {
        let game = Game::new(&random_spec(seed, &small_config(KernelMode::WithZeros, true))).unwrap();
        let caps = Caps::default();
        let sym = set_value_bruteforce(&game, 0, &zero(), PolicyClass::Symmetric, &caps).unwrap();
        let full = set_value_bruteforce(&game, 0, &zero(), PolicyClass::PathDependent, &caps).unwrap();
        prop_assert!(sym.is_subset(&full));
    }
}

use std::collections::BTreeSet;

use num_traits::Zero;
use proptest::prelude::*;
use setvalue_core::equilibrium::{pareto_filter, policy_values, set_value_bruteforce, Caps, ValueSet};
use setvalue_core::game::{Game, PolicyClass};
use setvalue_core::planner::{dictatorship_value, planner_optimum, time_inconsistency_probe, PlannerOutcome, Scalarization};
use setvalue_core::presets;
use setvalue_core::rational::{int, point, ratio};
use setvalue_core::{Error, Rational};

fn value_set() -> impl Strategy<Value = ValueSet> {
    prop::collection::vec(prop::collection::vec(-8i128..=8, 2), 1..12)
        .prop_map(|pts| ValueSet::from_points(pts.into_iter().map(|p| p.into_iter().map(|v| ratio(v, 2)).collect::<Vec<_>>())))
}

fn weights() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1i128..=9, 2).prop_map(|w| w.into_iter().map(int).collect())
}

fn argmin(outcome: &PlannerOutcome) -> BTreeSet<Vec<Rational>> {
    match outcome {
        PlannerOutcome::Optimum { argmin, .. } => argmin.iter().cloned().collect(),
        PlannerOutcome::NoEquilibrium => BTreeSet::new(),
    }
}

#[test]
fn coordination_example_ties() {
    let game = Game::new(&presets::example_path()).unwrap();
    let vs = set_value_bruteforce(&game, 0, &Rational::zero(), PolicyClass::PathDependent, &Caps::default()).unwrap();
    let lam = Scalarization::new(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
    let outcome = planner_optimum(&vs, &lam).unwrap();
    assert_eq!(outcome.value(), Some(&ratio(1, 8)));
    // All three equilibrium values have weighted cost 1/8.
    assert_eq!(argmin(&outcome).len(), 3);
    assert!(argmin(&outcome).contains(&point(&[(1, 8), (1, 8)])));

    let skewed = Scalarization::new(vec![int(1), int(3)]).unwrap();
    let outcome = planner_optimum(&vs, &skewed).unwrap();
    assert_eq!(argmin(&outcome), [point(&[(1, 4), (0, 1)])].into_iter().collect());
}

#[test]
fn empty_set_and_bad_weights() {
    let lam = Scalarization::uniform(2);
    assert_eq!(planner_optimum(&ValueSet::new(), &lam).unwrap(), PlannerOutcome::NoEquilibrium);
    assert!(matches!(Scalarization::new(vec![int(-1), int(2)]), Err(Error::InvalidArgument(_))));
    assert!(matches!(Scalarization::new(vec![int(0), int(0)]), Err(Error::InvalidArgument(_))));
    let three = ValueSet::from_points([vec![int(0), int(0), int(0)]]);
    assert!(planner_optimum(&three, &lam).is_err());
}

#[test]
fn probe_on_the_pareto_example() {
    let game = Game::new(&presets::example_pareto(ratio(1, 100)).unwrap()).unwrap();
    let lam = Scalarization::uniform(2);
    let report = time_inconsistency_probe(&game, 0, &lam, &Caps::default()).unwrap();
    assert_eq!(report.optimum.value(), Some(&ratio(21, 10)));
    assert_eq!(report.first_inconsistency, Some(1));
    assert_eq!(report.dictatorship, ratio(51, 25));
    assert!(report.dictatorship <= *report.optimum.value().unwrap());
    let selected = report.selected.unwrap();
    assert_eq!(lam.apply(&selected.value), ratio(21, 10));
}

#[test]
fn dictatorship_is_the_best_policy_value() {
    let game = Game::new(&presets::example_path()).unwrap();
    let lam = Scalarization::uniform(2);
    let all = policy_values(&game, 0, &Caps::default()).unwrap();
    let best = all.points().iter().map(|p| lam.apply(p)).min().unwrap();
    assert_eq!(dictatorship_value(&game, 0, &lam), best);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn argmin_is_pareto(vs in value_set(), w in weights()) {
        let lam = Scalarization::new(w).unwrap();
        let outcome = planner_optimum(&vs, &lam).unwrap();
        let front = pareto_filter(&vs);
        let best = vs.points().iter().map(|p| lam.apply(p)).min().unwrap();
        prop_assert_eq!(outcome.value(), Some(&best));
        for p in argmin(&outcome) {
            prop_assert!(front.has_point(&p));
            prop_assert_eq!(lam.apply(&p), best);
        }
    }

    #[test]
    fn rescaling_keeps_the_argmin(vs in value_set(), w in weights(), scale in 1i128..=20) {
        let lam = Scalarization::new(w.clone()).unwrap();
        let scaled = Scalarization::new(w.iter().map(|x| *x * ratio(scale, 7)).collect()).unwrap();
        prop_assert_eq!(lam.weights(), scaled.weights());
        prop_assert_eq!(
            argmin(&planner_optimum(&vs, &lam).unwrap()),
            argmin(&planner_optimum(&vs, &scaled).unwrap())
        );
    }
}

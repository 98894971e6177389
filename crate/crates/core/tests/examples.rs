//! Worked instances with hand-checked values, run through the public API
//! and confirmed against the oracle.

use alignment_core::continuous::{circle_uniform_value, solve_interval_both_fixed, solve_interval_free, solve_interval_one_fixed};
use alignment_core::discrete::{
    solve_hider_cardinality, solve_powerset, solve_searcher_cardinality, solve_singleton_pair, solve_two_by_two_k1,
    subset_atoms, SingletonCase, TwoLocationScenario,
};
use alignment_core::model::{
    arc_symmetric_difference, complement_strategy, interval_arc_payoff, mixed_payoff, subset_payoff, Arc, CostProfile,
    Domain, Family, GameSpec, MixedStrategy, PureStrategy, Side, Subset,
};
use alignment_core::oracle::{
    best_response, build_payoff_matrix, discretize_continuous, solve_matrix_game, verify_solution, OracleLimits,
    VerifyOptions,
};
use alignment_core::rational::{int, ratio, to_f64, Rational};
use alignment_core::{solve, Error};
use num_traits::Zero;

fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| int(x)).collect()
}

fn set(n: usize, members: &[usize]) -> Subset {
    Subset::from_indices(n, members.iter().map(|j| j - 1)).unwrap()
}

fn symmetric(costs: &[i64]) -> CostProfile {
    CostProfile::symmetric(ints(costs)).unwrap()
}

fn oracle_value(spec: &GameSpec) -> Rational {
    let limits = OracleLimits::default();
    let matrix = build_payoff_matrix(spec, &limits).unwrap();
    solve_matrix_game(&matrix, &limits).unwrap().exact().unwrap().value.clone()
}

fn certified(spec: &GameSpec) -> Rational {
    let solution = solve(spec).unwrap();
    let report = verify_solution(spec, &solution, &Rational::zero(), &VerifyOptions::default()).unwrap();
    assert!(report.passed, "{:?}", report);
    assert_eq!(oracle_value(spec), solution.value);
    solution.value
}

#[test]
fn subset_payoffs() {
    let profile = CostProfile::discrete(ints(&[2, 1]), ints(&[1, 1])).unwrap();
    assert_eq!(subset_payoff(&profile, set(2, &[2]), set(2, &[1])).unwrap(), int(3));
    let unit = symmetric(&[1, 1, 1]);
    assert_eq!(subset_payoff(&unit, set(3, &[1, 2]), set(3, &[2, 3])).unwrap(), int(2));
    assert_eq!(subset_payoff(&unit, set(3, &[1, 3]), set(3, &[1, 3])).unwrap(), int(0));
}

#[test]
fn arc_payoffs() {
    let alpha = ratio(2, 5);
    assert_eq!(interval_arc_payoff(&alpha, &int(0), &ratio(3, 10)).unwrap(), ratio(3, 5));
    assert_eq!(interval_arc_payoff(&alpha, &int(0), &ratio(3, 5)).unwrap(), ratio(4, 5));
    let arc = |d: Domain, s: Rational, l: Rational| Arc::for_domain(d, s, l).unwrap();
    let one = int(1);
    let half = ratio(1, 2);
    let circle = arc_symmetric_difference(
        Domain::Circle,
        &one,
        &one,
        &arc(Domain::Circle, int(0), half.clone()),
        &arc(Domain::Circle, ratio(1, 4), half.clone()),
    )
    .unwrap();
    assert_eq!(circle, half);
    let wrapped = arc_symmetric_difference(
        Domain::Circle,
        &int(2),
        &int(3),
        &arc(Domain::Circle, ratio(9, 10), ratio(1, 5)),
        &arc(Domain::Circle, int(0), ratio(1, 5)),
    )
    .unwrap();
    assert_eq!(wrapped, ratio(1, 2));
    let interval = arc_symmetric_difference(
        Domain::Interval,
        &one,
        &one,
        &arc(Domain::Interval, int(0), ratio(2, 5)),
        &arc(Domain::Interval, ratio(3, 10), ratio(2, 5)),
    )
    .unwrap();
    assert_eq!(interval, ratio(3, 5));
}

#[test]
fn mixed_payoffs_and_complements() {
    let spec = GameSpec::circle(int(1), int(1), Family::FixedLength(ratio(1, 2)), Family::FixedLength(ratio(1, 2))).unwrap();
    let uniform = MixedStrategy::uniform_start_arc(ratio(1, 2)).unwrap();
    assert_eq!(mixed_payoff(&spec, &uniform, &uniform).unwrap(), ratio(1, 2));

    let spec = GameSpec::finite(symmetric(&[1, 1]), Family::FixedCardinality(1), Family::PowerSet).unwrap();
    let hider = MixedStrategy::subsets(vec![(set(2, &[1]), ratio(1, 2)), (set(2, &[2]), ratio(1, 2))]).unwrap();
    let nothing = MixedStrategy::pure(PureStrategy::Subset(Subset::empty(2).unwrap()));
    assert_eq!(mixed_payoff(&spec, &hider, &nothing).unwrap(), int(1));

    let h = MixedStrategy::subsets(vec![(set(3, &[1]), ratio(1, 2)), (set(3, &[2]), ratio(1, 2))]).unwrap();
    let expected = MixedStrategy::subsets(vec![(set(3, &[2, 3]), ratio(1, 2)), (set(3, &[1, 3]), ratio(1, 2))]).unwrap();
    assert_eq!(complement_strategy(&h, 3).unwrap(), expected);
    let full = MixedStrategy::pure(PureStrategy::Subset(Subset::full(2).unwrap()));
    assert_eq!(complement_strategy(&nothing, 2).unwrap(), full);
}

#[test]
fn circle_games() {
    assert_eq!(circle_uniform_value(&ratio(1, 2), &ratio(1, 2), &int(1), &int(1)).unwrap(), ratio(1, 2));
    assert_eq!(circle_uniform_value(&int(0), &ratio(1, 3), &int(2), &int(1)).unwrap(), ratio(2, 3));
    assert_eq!(circle_uniform_value(&int(1), &int(1), &int(2), &int(5)).unwrap(), int(0));

    let free = GameSpec::circle(int(1), int(3), Family::FreeLength, Family::FreeLength).unwrap();
    let sol = solve(&free).unwrap();
    assert_eq!(sol.value, ratio(3, 4));
    assert_eq!(sol.hider, MixedStrategy::uniform_start_arc(ratio(1, 4)).unwrap());
    assert_eq!(sol.searcher, MixedStrategy::uniform_start_arc(ratio(3, 4)).unwrap());

    let short = GameSpec::circle(int(1), int(1), Family::FixedLength(ratio(3, 10)), Family::FreeLength).unwrap();
    let sol = solve(&short).unwrap();
    assert_eq!(sol.value, ratio(3, 10));
    let MixedStrategy::Atoms(atoms) = &sol.searcher else { panic!("searcher not pure") };
    let PureStrategy::Arc(arc) = &atoms[0].strategy else { panic!("not an arc") };
    assert!(arc.length().is_zero());

    let boundary = GameSpec::circle(int(1), int(1), Family::FixedLength(ratio(1, 2)), Family::FreeLength).unwrap();
    let sol = solve(&boundary).unwrap();
    assert_eq!(sol.value, ratio(1, 2));
    let MixedStrategy::Atoms(atoms) = &sol.searcher else { panic!("searcher not pure") };
    let PureStrategy::Arc(arc) = &atoms[0].strategy else { panic!("not an arc") };
    assert_eq!(arc.length(), &int(1));
}

#[test]
fn interval_games() {
    assert_eq!(solve_interval_free(&int(1), &int(1)).unwrap().value, ratio(1, 2));
    assert_eq!(solve_interval_free(&int(2), &int(2)).unwrap().value, int(1));
    assert!(matches!(solve_interval_free(&int(1), &int(2)), Err(Error::NoClosedForm(_))));

    assert_eq!(solve_interval_one_fixed(Side::Hider, &ratio(7, 10), &int(1), &int(1)).unwrap().value, ratio(3, 10));
    assert_eq!(solve_interval_one_fixed(Side::Hider, &ratio(1, 2), &int(1), &int(1)).unwrap().value, ratio(1, 2));
    assert_eq!(solve_interval_one_fixed(Side::Searcher, &ratio(1, 5), &int(1), &int(1)).unwrap().value, ratio(4, 5));

    let (sol, fixed) = solve_interval_both_fixed(&ratio(2, 5), &int(1), &int(1)).unwrap();
    assert_eq!((fixed.m, sol.value), (2, ratio(7, 15)));
    assert_eq!(fixed.searcher_points, vec![ratio(1, 15), ratio(8, 15)]);
    let (sol, fixed) = solve_interval_both_fixed(&ratio(3, 10), &int(1), &int(1)).unwrap();
    assert_eq!((fixed.m, sol.value), (3, ratio(5, 12)));
    assert_eq!(fixed.searcher_points, vec![ratio(1, 40), ratio(7, 20), ratio(27, 40)]);
    let (sol, fixed) = solve_interval_both_fixed(&int(1), &int(1), &int(1)).unwrap();
    assert_eq!((fixed.m, sol.value), (1, int(0)));
    assert!(solve_interval_both_fixed(&int(0), &int(1), &int(1)).is_err());

    let unequal = GameSpec::interval(int(1), int(1), Family::FixedLength(ratio(2, 5)), Family::FixedLength(ratio(3, 10))).unwrap();
    assert!(matches!(solve(&unequal), Err(Error::NoClosedForm(_))));
}

#[test]
fn power_set_games() {
    let profile = CostProfile::discrete(ints(&[2, 1]), ints(&[1, 1])).unwrap();
    let sol = solve_powerset(&profile).unwrap();
    assert_eq!(sol.value, ratio(7, 6));
    let atoms = subset_atoms(&sol.hider).unwrap();
    let p = |members: &[usize]| atoms.iter().find(|(s, _)| *s == set(2, members)).unwrap().1.clone();
    assert_eq!((p(&[]), p(&[1]), p(&[2]), p(&[1, 2])), (ratio(1, 6), ratio(1, 3), ratio(1, 6), ratio(1, 3)));
    let spec = GameSpec::finite(profile, Family::PowerSet, Family::PowerSet).unwrap();
    assert_eq!(certified(&spec), ratio(7, 6));

    let equal = solve_powerset(&symmetric(&[3, 1, 4])).unwrap();
    assert_eq!(equal.value, ratio(4, 1));
    assert!(subset_atoms(&equal.hider).unwrap().iter().all(|(_, p)| *p == ratio(1, 8)));
    assert_eq!(solve_powerset(&symmetric(&[1])).unwrap().value, ratio(1, 2));
}

#[test]
fn two_location_games() {
    let profile = CostProfile::discrete(ints(&[3, 2]), ints(&[1, 2])).unwrap();
    let (sol, scenario) = solve_two_by_two_k1(&profile).unwrap();
    assert_eq!((scenario, sol.value.clone()), (TwoLocationScenario::I, ratio(3, 2)));
    let searcher = subset_atoms(&sol.searcher).unwrap();
    assert!(searcher.contains(&(Subset::empty(2).unwrap(), ratio(3, 4))));
    assert!(searcher.contains(&(set(2, &[2]), ratio(1, 4))));
    assert!(subset_atoms(&sol.hider).unwrap().contains(&(set(2, &[1]), ratio(1, 2))));

    let profile = CostProfile::discrete(ints(&[1, 1]), ints(&[2, 2])).unwrap();
    let (sol, scenario) = solve_two_by_two_k1(&profile).unwrap();
    assert_eq!((scenario, sol.value), (TwoLocationScenario::II, int(1)));

    // On the boundary both scenarios apply; whichever is returned must verify.
    for (c, pi) in [([2, 2], [2, 2]), ([4, 1], [2, 2]), ([3, 1], [1, 3])] {
        let profile = CostProfile::discrete(ints(&c), ints(&pi)).unwrap();
        let spec = GameSpec::finite(profile, Family::FixedCardinality(1), Family::PowerSet).unwrap();
        certified(&spec);
    }
}

#[test]
fn cardinality_games() {
    let sol = solve_hider_cardinality(&ints(&[4, 3, 2, 1]), 2).unwrap();
    assert_eq!(sol.value, int(5));
    let searcher = subset_atoms(&sol.searcher).unwrap();
    for (members, p) in [(&[][..], ratio(5, 8)), (&[1], ratio(1, 24)), (&[1, 2], ratio(1, 12)), (&[1, 2, 3], ratio(1, 4))] {
        assert!(searcher.contains(&(set(4, members), p)));
    }
    let hider = subset_atoms(&sol.hider).unwrap();
    assert_eq!(hider, vec![(set(4, &[1, 2]), ratio(1, 2)), (set(4, &[3, 4]), ratio(1, 2))]);

    let sol = solve_hider_cardinality(&ints(&[1, 1]), 1).unwrap();
    assert_eq!(sol.value, int(1));
    assert_eq!(subset_atoms(&sol.searcher).unwrap(), vec![(Subset::empty(2).unwrap(), int(1))]);

    let sol = solve_hider_cardinality(&ints(&[3, 2, 1]), 2).unwrap();
    assert_eq!(sol.value, ratio(5, 2));
    let hider = subset_atoms(&sol.hider).unwrap();
    assert_eq!(hider.len(), 2);
    assert!(hider.contains(&(set(3, &[2, 3]), ratio(1, 2))));
    assert!(hider.contains(&(set(3, &[1, 3]), ratio(1, 2))));

    let sol = solve_searcher_cardinality(&ints(&[1, 1]), 1).unwrap();
    assert_eq!(sol.value, int(1));
    assert_eq!(subset_atoms(&sol.hider).unwrap(), vec![(Subset::full(2).unwrap(), int(1))]);
    assert_eq!(solve_searcher_cardinality(&ints(&[4, 3, 2, 1]), 2).unwrap().value, int(5));

    for (k, hider_side) in [(2, true), (2, false), (1, true), (3, true)] {
        let (h, s) = if hider_side {
            (Family::FixedCardinality(k), Family::PowerSet)
        } else {
            (Family::PowerSet, Family::FixedCardinality(k))
        };
        let spec = GameSpec::finite(symmetric(&[4, 3, 2, 1]), h, s).unwrap();
        certified(&spec);
    }
}

#[test]
fn singleton_games() {
    let (sol, data) = solve_singleton_pair(&ints(&[1, 1])).unwrap();
    assert_eq!((data.case, sol.value), (SingletonCase::Pennies, int(1)));

    let (sol, data) = solve_singleton_pair(&ints(&[1, 1, 1])).unwrap();
    assert_eq!((data.case, data.threshold, sol.value), (SingletonCase::One, Some(2), ratio(4, 3)));
    assert!(data.hider.iter().all(|p| *p == ratio(1, 3)));

    let (sol, data) = solve_singleton_pair(&ints(&[10, 5, 2, 1])).unwrap();
    assert_eq!((data.case, data.threshold), (SingletonCase::Two, Some(2)));
    assert_eq!(sol.value, ratio(39, 5));
    assert_eq!(data.hider, vec![ratio(9, 20), ratio(2, 5), ratio(3, 20), int(0)]);
    assert_eq!(data.searcher, vec![ratio(2, 5), ratio(3, 10), int(0), ratio(3, 10)]);

    let spec = GameSpec::finite(symmetric(&[10, 5, 2, 1]), Family::FixedCardinality(1), Family::FixedCardinality(1)).unwrap();
    assert_eq!(certified(&spec), ratio(39, 5));
    let limits = OracleLimits::default();
    let (response, payoff) = best_response(&spec, &sol.hider, Side::Searcher, &limits).unwrap();
    assert_eq!(payoff, ratio(39, 5));
    assert_eq!(response, PureStrategy::Subset(set(4, &[1])));
}

#[test]
fn matrix_examples() {
    let limits = OracleLimits::default();
    let profile = CostProfile::discrete(ints(&[2, 1]), ints(&[1, 1])).unwrap();
    let spec = GameSpec::finite(profile, Family::PowerSet, Family::PowerSet).unwrap();
    let matrix = build_payoff_matrix(&spec, &limits).unwrap();
    assert_eq!(matrix.entries()[0], ints(&[0, 2, 1, 3]));

    let pennies = GameSpec::finite(symmetric(&[1, 1]), Family::FixedCardinality(1), Family::FixedCardinality(1)).unwrap();
    let matrix = build_payoff_matrix(&pennies, &limits).unwrap();
    assert_eq!(matrix.entries(), vec![ints(&[0, 2]), ints(&[2, 0])]);
    let solved = solve_matrix_game(&matrix, &limits).unwrap();
    let exact = solved.exact().unwrap();
    assert_eq!(exact.value, int(1));
    assert_eq!(exact.row_mix, vec![ratio(1, 2), ratio(1, 2)]);

    let nothing = Family::Explicit(vec![Subset::empty(2).unwrap()]);
    let trivial = GameSpec::finite(symmetric(&[1, 1]), nothing.clone(), nothing).unwrap();
    assert_eq!(build_payoff_matrix(&trivial, &limits).unwrap().entries(), vec![ints(&[0])]);

    let triple = GameSpec::finite(symmetric(&[1, 1, 1]), Family::FixedCardinality(1), Family::FixedCardinality(1)).unwrap();
    assert_eq!(oracle_value(&triple), ratio(4, 3));
}

#[test]
fn discretized_continuous_games() {
    let limits = OracleLimits::default();
    let value = |spec: &GameSpec, step: Rational| {
        let matrix = discretize_continuous(spec, &step, &limits).unwrap();
        solve_matrix_game(&matrix, &limits).unwrap().value_f64()
    };
    let alpha = Family::FixedLength(ratio(2, 5));
    let interval = GameSpec::interval(int(1), int(1), alpha.clone(), alpha).unwrap();
    assert!((value(&interval, ratio(1, 100)) - 7.0 / 15.0).abs() <= 0.02);
    let half = Family::FixedLength(ratio(1, 2));
    let circle = GameSpec::circle(int(1), int(1), half.clone(), half).unwrap();
    assert!((value(&circle, ratio(1, 50)) - 0.5).abs() <= 0.02);
    let whole = GameSpec::interval(int(1), int(1), Family::FixedLength(int(1)), Family::FixedLength(int(1))).unwrap();
    assert_eq!(value(&whole, ratio(1, 10)), 0.0);
    let free = GameSpec::circle(int(1), int(1), Family::FreeLength, Family::FreeLength).unwrap();
    assert!(discretize_continuous(&free, &ratio(1, 10), &limits).is_err());
}

#[test]
fn interval_solution_passes_the_grid_check() {
    let alpha = Family::FixedLength(ratio(2, 5));
    let spec = GameSpec::interval(int(1), int(1), alpha.clone(), alpha).unwrap();
    let sol = solve(&spec).unwrap();
    let report = verify_solution(&spec, &sol, &ratio(1, 1_000_000), &VerifyOptions::default()).unwrap();
    assert!(report.passed, "{report:?}");
    assert!((report.hider_guarantee.to_f64() - to_f64(&ratio(7, 15))).abs() < 1e-9);
}

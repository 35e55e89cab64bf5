mod common;

use common::checked_run;
use pareto_front_core::reference::{bound_value, brute_force_fronts, find_monotonicity_violation};
use pareto_front_core::{
    enumerate, is_antichain, maximal_elements, ConeUnionOracle, CountingOracle, MonotonicityGuard, OracleError, Point,
    PointSet, SearchSpace, SelectionStrategy, WeightedThresholdOracle,
};
use proptest::prelude::*;

#[test]
fn leq_is_a_partial_order_on_small_grids() {
    for (k, n) in [(1, 4), (2, 4), (3, 3)] {
        let space = SearchSpace::uniform(k, n).unwrap();
        let points: Vec<Point> = space.points().collect();
        for a in &points {
            assert!(a.leq(a));
            for b in &points {
                if a.leq(b) && b.leq(a) {
                    assert_eq!(a, b);
                }
                if !a.leq(b) {
                    continue;
                }
                for c in &points {
                    if b.leq(c) {
                        assert!(a.leq(c), "{a} <= {b} <= {c}");
                    }
                }
            }
        }
    }
}

#[test]
fn builtin_families_pass_exhaustive_monotonicity_scan() {
    for bounds in [vec![5], vec![3, 5], vec![5, 4, 3]] {
        let space = SearchSpace::new(bounds).unwrap();
        let k = space.arity();
        for seed in 0..10u64 {
            let gens: PointSet = (0..3)
                .map(|j| space.bounds().iter().map(|&n| (seed * 7 + j * 3) % (n + 1)).collect::<Vec<_>>().into())
                .collect();
            let mut cone = ConeUnionOracle::new(space.clone(), gens).unwrap();
            assert_eq!(find_monotonicity_violation(&space, &mut cone).unwrap(), None);
            let weights = (0..k as u64).map(|i| (seed + i) % 4).collect();
            let mut thr = WeightedThresholdOracle::new(space.clone(), weights, seed as i64 * 2 - 3).unwrap();
            assert_eq!(find_monotonicity_violation(&space, &mut thr).unwrap(), None);
        }
    }
}

#[test]
fn guard_stops_a_non_monotone_oracle() {
    let space = SearchSpace::uniform(2, 3).unwrap();
    // odd coordinate sum, plus the top corner
    let parity = |p: &Point| p.coords().iter().sum::<u64>() % 2 == 1 || p.coords() == [3, 3];
    let mut guarded = MonotonicityGuard::new(pareto_front_core::oracle::from_fn(parity));
    let err = enumerate(space, &mut guarded, SelectionStrategy::default(), |_| {}).unwrap_err();
    let OracleError::NonMonotone { feasible, infeasible } = err.error else {
        panic!("expected a monotonicity violation, got {}", err.error);
    };
    assert_eq!((feasible.clone(), infeasible.clone()), (Point::from([1, 0]), Point::from([1, 3])));
    assert!(feasible.leq(&infeasible));
    assert!(parity(&feasible) && !parity(&infeasible));
}

fn arb_point(k: usize, n: u64) -> impl Strategy<Value = Point> {
    proptest::collection::vec(0..=n, k).prop_map(Point::new)
}

fn arb_set(k: usize, n: u64, max: usize) -> impl Strategy<Value = PointSet> {
    proptest::collection::vec(arb_point(k, n), 0..max).prop_map(|v| v.into_iter().collect())
}

fn arb_instance() -> impl Strategy<Value = (SearchSpace, ConeUnionOracle)> {
    proptest::collection::vec(0u64..=5, 1..=3).prop_flat_map(|bounds| {
        let space = SearchSpace::new(bounds.clone()).unwrap();
        let gen = bounds.iter().map(|&n| 0..=n).collect::<Vec<_>>().prop_map(Point::new);
        proptest::collection::vec(gen, 0..6).prop_map(move |gens| {
            let oracle = ConeUnionOracle::new(space.clone(), gens.into_iter().collect()).unwrap();
            (space.clone(), oracle)
        })
    })
}

proptest! {
    #[test]
    fn maximal_elements_matches_brute_force(s in arb_set(3, 4, 25)) {
        let m = maximal_elements(&s);
        let brute: PointSet = s
            .iter()
            .filter(|x| s.iter().all(|y| !(x.leq(y) && x != &y)))
            .cloned()
            .collect();
        prop_assert_eq!(&m, &brute);
        prop_assert!(is_antichain(&m));
        prop_assert!(m.iter().all(|x| s.contains(x)));
        prop_assert_eq!(maximal_elements(&m), m.clone());
        for x in &s {
            prop_assert!(m.has_above(x), "{} not covered", x);
        }
    }

    #[test]
    fn enumeration_matches_brute_force_for_every_strategy((space, oracle) in arb_instance()) {
        let brute = brute_force_fronts(&space, &mut oracle.clone()).unwrap();
        for strategy in SelectionStrategy::ALL {
            let (r, _) = checked_run(&space, &mut oracle.clone(), strategy).map_err(TestCaseError::fail)?;
            prop_assert_eq!(&r.front, &brute.front);
            prop_assert_eq!(&r.co_front, &brute.co_front);
            let bound = bound_value(&space, brute.front.len() as u64, brute.co_front.len() as u64);
            prop_assert!(r.stats.total_calls <= bound);
        }
    }

    #[test]
    fn threshold_oracles_enumerate_correctly(
        weights in proptest::collection::vec(0u64..4, 3),
        threshold in -2i64..30,
    ) {
        let space = SearchSpace::new(vec![4, 3, 5]).unwrap();
        let oracle = WeightedThresholdOracle::new(space.clone(), weights, threshold).unwrap();
        let brute = brute_force_fronts(&space, &mut oracle.clone()).unwrap();
        let r = enumerate(space, &mut oracle.clone(), SelectionStrategy::QueueOrder, |_| {}).unwrap();
        prop_assert_eq!(r.front, brute.front);
        prop_assert_eq!(r.co_front, brute.co_front);
    }

    #[test]
    fn brute_force_fronts_cover_the_grid((space, oracle) in arb_instance()) {
        let mut counted = CountingOracle::new(oracle.clone());
        let brute = brute_force_fronts(&space, &mut counted).unwrap();
        prop_assert_eq!(counted.stats().total_calls, space.grid_size().unwrap());
        prop_assert!(is_antichain(&brute.front) && is_antichain(&brute.co_front));
        let mut o = oracle;
        for p in space.points() {
            if pareto_front_core::FeasibilityOracle::evaluate(&mut o, &p).unwrap() {
                prop_assert!(brute.front.has_below(&p));
            } else {
                prop_assert!(brute.co_front.has_above(&p));
            }
        }
    }
}

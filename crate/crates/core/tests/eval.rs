use poplearn::eval::*;
use poplearn::games::{random_zero_sum_game, rps_game, MarkovGame};
use poplearn::learning::Population;
use poplearn::{rng_for, Executor, MixedStrategy, TabularPolicy};
use proptest::prelude::*;

fn strategy(k: usize) -> impl Strategy<Value = MixedStrategy> {
    proptest::collection::vec(0.0f64..1.0, k).prop_map(move |mut w| {
        w[0] += 1e-3;
        MixedStrategy::from_weights(&w).unwrap()
    })
}

fn population(k: usize) -> impl Strategy<Value = Vec<MixedStrategy>> {
    proptest::collection::vec(strategy(k), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rpp_is_antisymmetric(seed in 0u64..1000, a in population(4), b in population(4)) {
        let g = random_zero_sum_game(4, seed).unwrap();
        let ex = Executor::sequential();
        let (pa, pb) = (Population::from_policies(a), Population::from_policies(b));
        let ab = rpp_between(&pa, &pb, &g, 1, 0, &ex).unwrap();
        let ba = rpp_between(&pb, &pa, &g, 1, 0, &ex).unwrap();
        prop_assert!((ab + ba).abs() <= 1e-9, "{} vs {}", ab, ba);
    }

    #[test]
    fn rpp_against_itself_is_zero(seed in 0u64..1000, a in population(4)) {
        let g = random_zero_sum_game(4, seed).unwrap();
        let p = Population::from_policies(a);
        prop_assert!(rpp_between(&p, &p, &g, 1, 0, &Executor::sequential()).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn rpp_is_monotone_under_extension(seed in 0u64..1000, a in population(3), extra in strategy(3), b in population(3)) {
        let g = random_zero_sum_game(3, seed).unwrap();
        let ex = Executor::sequential();
        let pb = Population::from_policies(b);
        let base = rpp_between(&Population::from_policies(a.clone()), &pb, &g, 1, 0, &ex).unwrap();
        let mut bigger = a;
        bigger.push(extra);
        let extended = rpp_between(&Population::from_policies(bigger), &pb, &g, 1, 0, &ex).unwrap();
        prop_assert!(extended >= base - 1e-9);
    }

    #[test]
    fn exact_payoffs_are_antisymmetric(seed in 0u64..1000, a in population(5)) {
        let g = random_zero_sum_game(5, seed).unwrap();
        let u = eval_population(&Population::from_policies(a), &g, 1, 0, &Executor::sequential()).unwrap();
        prop_assert!((&u.values + u.values.transpose()).amax() <= 1e-12);
    }
}

#[test]
fn monte_carlo_payoffs_are_antisymmetrized() {
    let env = MarkovGame::iterated_rps(3).unwrap();
    let pols: Vec<TabularPolicy> = (0..3).map(|k| TabularPolicy::random(&mut rng_for(4, &[k]))).collect();
    let u = eval_population(&Population::from_policies(pols), &env, 50, 1, &Executor::sequential()).unwrap();
    assert_eq!(&u.values, &(-u.values.transpose()));
    assert_eq!(u.episodes_per_cell, 50);
}

#[test]
fn meta_nash_of_pure_rps_population_is_unexploitable() {
    let g = rps_game();
    let pop = Population::from_policies((0..3).map(|a| MixedStrategy::pure(3, a)).collect());
    let m = meta_nash_exploitability(&pop, &g, 1, 0, &Executor::sequential()).unwrap();
    assert!(m.exploitability <= 1e-6);
}

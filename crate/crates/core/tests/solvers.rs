mod common;

use common::oracles::*;
use poplearn::solvers::{column_payoffs, exploitability, relative_population_performance, solve_maximin, solve_mene};
use poplearn::MixedStrategy;
use proptest::prelude::*;

#[test]
fn maximin_matches_support_enumeration_on_sign_games() {
    for (m, n) in [(2, 2), (3, 3)] {
        for u in all_sign_matrices(m, n) {
            let (p, value) = solve_maximin(&u).unwrap();
            let (expected, _) = brute_force_value(&u);
            assert!((value.0 - expected).abs() <= 1e-9, "value {} vs {} for {u}", value.0, expected);
            assert!(column_payoffs(&u, p.probs()).iter().all(|c| *c >= value.0 - 1e-9));
        }
    }
}

#[test]
fn mene_matches_nested_search_on_antisymmetric_sign_games() {
    for u in antisymmetric_sign_games() {
        let p = solve_mene(&u).unwrap();
        let expected = brute_force_mene_3rows(&u);
        let gap = p.probs().iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap <= 1e-6, "MENE {:?} vs oracle {expected:?} for {u}", p.probs());
    }
}

#[test]
fn mene_on_rectangular_sign_games() {
    // Non-antisymmetric three-row games exercise polytopes of every shape.
    for u in all_sign_matrices(3, 2) {
        let p = solve_mene(&u).unwrap();
        let expected = brute_force_mene_3rows(&u);
        let gap = p.probs().iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap <= 1e-6, "MENE {:?} vs oracle {expected:?} for {u}", p.probs());
    }
}

fn antisymmetric(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                u[(i, j)] = v[i * n + j];
                u[(j, i)] = -v[i * n + j];
            }
        }
        u
    })
}

fn general(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(m, n)| {
        prop::collection::vec(-2.0f64..2.0, m * n).prop_map(move |v| Matrix::from_row_slice(m, n, &v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn maximin_guarantees_value(u in general(6)) {
        let (p, value) = solve_maximin(&u).unwrap();
        let (expected, _) = brute_force_value(&u);
        prop_assert!((value.0 - expected).abs() <= 1e-9);
        prop_assert!(column_payoffs(&u, p.probs()).iter().all(|c| *c >= value.0 - 1e-9));
    }

    #[test]
    fn mene_is_maximin_with_no_less_entropy(u in general(6)) {
        let (p, value) = solve_maximin(&u).unwrap();
        let q = solve_mene(&u).unwrap();
        prop_assert!(column_payoffs(&u, q.probs()).iter().all(|c| *c >= value.0 - 1e-9));
        prop_assert!(q.entropy() >= p.entropy() - 1e-9);
    }

    #[test]
    fn mene_is_permutation_equivariant(u in general(5), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut perm: Vec<usize> = (0..u.nrows()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let permuted = Matrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(perm[i], j)]);
        let p = solve_mene(&u).unwrap();
        let q = solve_mene(&permuted).unwrap();
        for (i, &k) in perm.iter().enumerate() {
            prop_assert!((q.probs()[i] - p.probs()[k]).abs() <= 1e-7);
        }
    }

    #[test]
    fn mene_is_unexploitable_in_antisymmetric_games(u in (1usize..8).prop_flat_map(antisymmetric)) {
        let p = solve_mene(&u).unwrap();
        prop_assert!(exploitability(&u, &p).unwrap() <= 1e-6);
    }

    #[test]
    fn rpp_zero_sum_duality(u in general(5)) {
        let forward = relative_population_performance(&u).unwrap();
        let backward = relative_population_performance(&(-u.transpose())).unwrap();
        prop_assert!((forward + backward).abs() <= 1e-9);
    }
}

#[test]
fn exploitability_nonnegative_for_random_mixtures() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for seed in 0..50 {
        let u = poplearn::games::random_zero_sum_game(5, seed).unwrap();
        let s = MixedStrategy::random(5, &mut rng);
        assert!(exploitability(u.payoff(), &s).unwrap() >= 0.0);
    }
}

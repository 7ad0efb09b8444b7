use poplearn::graphs::graph_fictitious_play;
use poplearn::learning::{PayoffEstimator, Population, PopulationInit};
use poplearn::serialize::*;
use poplearn::{rng_for, Matrix, TabularPolicy};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn csv_bytes_round_trip(rows in 1usize..5, cols in 1usize..5, values in proptest::collection::vec(-1e6f64..1e6, 25)) {
        let m = Matrix::from_fn(rows, cols, |i, j| values[i * 5 + j]);
        let text = matrix_to_csv(&m);
        let back = matrix_from_csv(&text).unwrap();
        prop_assert_eq!(matrix_to_csv(&back), text);
        prop_assert!((&back - &m).amax() <= 1e-8 * m.amax().max(1.0));
    }

    #[test]
    fn checkpoints_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let mut k = 0;
        let pop = Population::from_graph(&graph_fictitious_play(n).unwrap(), PopulationInit::with_sink(TabularPolicy::pure(0)), || {
            k += 1;
            TabularPolicy::random(&mut rng_for(seed, &[k]))
        }).unwrap();
        let mut est = PayoffEstimator::new(n, 0.7).unwrap();
        est.update(0, n - 1, 0.25).unwrap();
        let cp = Checkpoint::new(&pop, Some(&est), serde_json::json!({"seed": seed}), 3);
        let back: Checkpoint<TabularPolicy> = checkpoint_from_json(&checkpoint_to_json(&cp).unwrap()).unwrap();
        prop_assert_eq!(back.population().unwrap(), pop);
        prop_assert_eq!(back, cp);
    }
}

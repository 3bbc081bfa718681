use proptest::prelude::*;
use quantumness::experiment::{
    poisson_resample, probs_from_counts, tomography_reconstruct, two_qubit_projectors, TomographyInput,
};
use quantumness::nonlocality::{
    chsh_f_vector, chsh_f_vector_masked, chsh_value, deterministic_boxes, svetlichny_f_vector, svetlichny_value,
    CellMask, ChshLevel, CorrelationTable, ParityMask, WitnessOperator,
};
use quantumness::{majorizes, BoundVector, DensityMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vec_of(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

fn random_table(parties: usize, seed: u64) -> CorrelationTable {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_out = 1 << parties;
    let n_set = 1 << parties;
    let mut probs = Vec::with_capacity(n_out * n_set);
    for _ in 0..n_set {
        let w: Vec<f64> = (0..n_out).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        probs.extend(w.iter().map(|v| v / s));
    }
    CorrelationTable::new(vec![2; parties], vec![2; parties], probs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn majorization_is_reflexive(v in vec_of(6)) {
        let x = BoundVector::raw(v).sort_desc();
        prop_assert!(majorizes(&x, &x, 1e-12).unwrap());
    }

    #[test]
    fn majorization_is_transitive(a in vec_of(5), b in vec_of(5), c in vec_of(5)) {
        let (x, y, z) = (
            BoundVector::raw(a).sort_desc(),
            BoundVector::raw(b).sort_desc(),
            BoundVector::raw(c).sort_desc(),
        );
        if majorizes(&x, &y, 1e-12).unwrap() && majorizes(&y, &z, 1e-12).unwrap() {
            prop_assert!(majorizes(&x, &z, 1e-11).unwrap());
        }
    }

    #[test]
    fn sorted_arrangements_sandwich_the_raw_vector(v in vec_of(7)) {
        let raw = BoundVector::raw(v);
        prop_assert!(majorizes(&raw.sort_asc(), &raw, 1e-12).unwrap());
        prop_assert!(majorizes(&raw, &raw.sort_desc(), 1e-12).unwrap());
    }

    #[test]
    fn cumulative_round_trip_on_integers(levels in prop::collection::vec(-1000i32..1000, 1..8)) {
        let levels: Vec<f64> = levels.into_iter().map(f64::from).collect();
        let back = BoundVector::from_cumulative(&levels).prefix_sums();
        prop_assert_eq!(back, levels);
    }

    #[test]
    fn count_probabilities_are_scale_invariant(
        counts in prop::collection::vec(1u64..100_000, 4),
        factor in 1u64..1000,
    ) {
        let p = probs_from_counts(&counts).unwrap();
        let scaled: Vec<u64> = counts.iter().map(|c| c * factor).collect();
        let q = probs_from_counts(&scaled).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
        if factor.is_power_of_two() {
            prop_assert_eq!(p, q);
        }
    }

    #[test]
    fn chsh_f_total_is_two(seed in any::<u64>()) {
        let t = random_table(2, seed);
        prop_assert!((chsh_f_vector(&t).unwrap().total() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn masked_chsh_entries_sum_to_one_plus_half_s(seed in any::<u64>()) {
        let t = random_table(2, seed);
        let masked = chsh_f_vector_masked(&t, CellMask::Diagonal).unwrap().total();
        let s = chsh_value(&t).unwrap();
        prop_assert!((masked - (1.0 + s / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn local_mixtures_satisfy_classical_chsh(w in prop::collection::vec(0.0..1.0f64, 16)) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-6);
        let weights: Vec<f64> = w.iter().map(|v| v / total).collect();
        let mix = CorrelationTable::mixture(&deterministic_boxes(2), &weights).unwrap();
        let f = chsh_f_vector_masked(&mix, CellMask::Diagonal).unwrap().sort_desc();
        prop_assert!(majorizes(&f, &ChshLevel::Classical.vector(), 1e-12).unwrap());
        prop_assert!(chsh_value(&mix).unwrap() <= 2.0 + 1e-12);
    }

    #[test]
    fn svetlichny_totals(seed in any::<u64>()) {
        let t = random_table(3, seed);
        let s3 = svetlichny_value(&t).unwrap();
        prop_assert!((svetlichny_f_vector(&t, ParityMask::None).unwrap().total() - 4.0).abs() < 1e-12);
        let even = svetlichny_f_vector(&t, ParityMask::Even).unwrap().total();
        prop_assert!((even - (2.0 + s3 / 2.0)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witness_total_is_expectation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = DensityMatrix::random_ginibre(4, &mut rng);
        let w = WitnessOperator::bell();
        let total = w.f_vector(&rho).unwrap().total();
        prop_assert!((total - w.value(&rho).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tomography_is_idempotent_on_valid_states(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = DensityMatrix::random_ginibre(4, &mut rng);
        let input = TomographyInput::from_state(&rho, &two_qubit_projectors()).unwrap();
        let once = tomography_reconstruct(&input).unwrap();
        prop_assert!(once.matrix().max_abs_diff(rho.matrix()) < 1e-9);
        let again = tomography_reconstruct(&TomographyInput::from_state(&once, &two_qubit_projectors()).unwrap()).unwrap();
        prop_assert!(again.matrix().max_abs_diff(once.matrix()) < 1e-9);
    }

    #[test]
    fn resampling_is_reproducible(
        counts in prop::collection::vec(0u64..5000, 4),
        seed in any::<u64>(),
    ) {
        let stat = |c: &[u64]| Ok(c.iter().sum::<u64>() as f64);
        let a = poisson_resample(&counts, 1000, seed, stat).unwrap();
        let b = poisson_resample(&counts, 1000, seed, stat).unwrap();
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.std.to_bits(), b.std.to_bits());
        prop_assert_eq!(a.values, b.values);
    }
}

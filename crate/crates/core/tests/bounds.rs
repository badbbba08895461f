use proptest::prelude::*;
use qfp_core::bounds::{
    anticoncentration_margin, complex_hoeffding_bound, distinguishing_probability_estimate, eps_net_size_bound,
    fibonacci_qubit_grid, greedy_eps_net, haar_tail_suite, hoeffding_bound, hoeffding_suite, mgf_bound,
    projection_anticoncentration_check, qubit_eps_net_check, relaxed_chernoff_bound, simplex_uniformity_suite,
    validate_all, CheckStatus, SuiteBudget,
};
use qfp_core::linalg::pure_trace_distance;
use qfp_core::{DensityOperator, SeedStream, UnitVector};

proptest! {
    #[test]
    fn hoeffding_decreases_in_t(t in 0.1f64..50.0, dt in 0.01f64..10.0, n in 1usize..200) {
        let r = vec![(-1.0, 1.0); n];
        prop_assert!(hoeffding_bound(t + dt, &r).unwrap().value <= hoeffding_bound(t, &r).unwrap().value);
    }

    #[test]
    fn hoeffding_increases_with_ranges(t in 0.1f64..50.0, n in 1usize..100, extra in 1usize..50) {
        let small = hoeffding_bound(t, &vec![(0.0, 1.0); n]).unwrap().value;
        let large = hoeffding_bound(t, &vec![(0.0, 1.0); n + extra]).unwrap().value;
        prop_assert!(small <= large);
    }

    #[test]
    fn clamped_bound_is_a_probability(t in 0.01f64..5.0, n in 1usize..100) {
        let b = hoeffding_bound(t, &vec![(0.0, 1.0); n]).unwrap();
        prop_assert!(b.clamped <= 1.0 && b.clamped <= b.value);
    }

    #[test]
    fn complex_hoeffding_decreases_in_t(t in 0.1f64..50.0, dt in 0.01f64..10.0) {
        let c = [1.0; 16];
        prop_assert!(complex_hoeffding_bound(t + dt, &c).unwrap() <= complex_hoeffding_bound(t, &c).unwrap());
    }

    #[test]
    fn chernoff_decreases_in_n(n in 1u64..100_000, dn in 1u64..1000, t in 0.001f64..0.07) {
        prop_assert!(relaxed_chernoff_bound(n + dn, t, 2.0, 2.0).unwrap() <= relaxed_chernoff_bound(n, t, 2.0, 2.0).unwrap());
    }

    #[test]
    fn mgf_increases_in_h(h in 0.01f64..1.9, dh in 0.0f64..0.1) {
        prop_assert!(mgf_bound(h, 1.0, 4.0, 4.0).unwrap() <= mgf_bound(h + dh, 1.0, 4.0, 4.0).unwrap());
    }

    #[test]
    fn net_bound_grows_as_eps_shrinks(eps in 0.05f64..2.0, d in 1usize..5) {
        prop_assert!(eps_net_size_bound(d, eps).unwrap() <= eps_net_size_bound(d, eps * 0.9).unwrap());
    }
}

#[test]
fn formula_examples() {
    let b = hoeffding_bound(20.0, &vec![(-1.0, 1.0); 100]).unwrap();
    assert!((b.value - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
    assert!((complex_hoeffding_bound(24.0, &[1.0; 64]).unwrap() - 4.0 * (-2.25f64).exp()).abs() < 1e-15);
    let l = 2f64.ln();
    assert!((mgf_bound(1.0, 1.0, 4.0, 4.0).unwrap() - (1.0 + 9.0 * l * l / 32.0).exp()).abs() < 1e-12);
    assert_eq!(eps_net_size_bound(2, 1.0).unwrap(), 16.0);
    assert!((anticoncentration_margin(8) - 1.0 / (88.0 * 64.0 * 8f64.ln())).abs() < 1e-18);
}

#[test]
fn coin_sums_respect_hoeffding() {
    let r = hoeffding_suite(100, 20.0, 100_000, SeedStream::new(7)).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.empirical <= r.bound_value);
}

#[test]
fn haar_tail_matches_closed_form() {
    for x in [0.1, 0.3, 0.5] {
        let r = haar_tail_suite(8, x, 40_000, SeedStream::new(9)).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.bound_value - (1.0 - x).powi(7)).abs() < 1e-12);
    }
}

#[test]
fn simplex_passes_chi_square() {
    let r = simplex_uniformity_suite(10, 0.001, 30_000, SeedStream::new(11)).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn qubit_net_packs_and_covers() {
    let r = qubit_eps_net_check(1.0, 400, 100_000, SeedStream::new(2)).unwrap();
    assert!(r.size as f64 <= 16.0);
    assert!(r.min_pairwise >= 1.0);
    assert!(r.max_probe_distance <= 1.0);
    assert!(r.passed);
}

#[test]
fn greedy_net_keeps_separation() {
    let grid = fibonacci_qubit_grid(200);
    let net = greedy_eps_net(&grid, 0.5);
    for (i, a) in net.iter().enumerate() {
        for b in &net[i + 1..] {
            assert!(pure_trace_distance(a, b) >= 0.5);
        }
    }
    for g in &grid {
        assert!(net.iter().any(|m| pure_trace_distance(m, g) < 0.5));
    }
}

#[test]
fn distinguishing_identical_states() {
    let s = DensityOperator::maximally_mixed(3).unwrap();
    let out = distinguishing_probability_estimate(&s, &s, &s, &[0.0, 0.5], 2000, SeedStream::new(3)).unwrap();
    assert_eq!(out, vec![(0.0, 1.0), (0.5, 0.0)]);
}

#[test]
fn distinguishing_orthogonal_qubits() {
    // |v_0|^2 is uniform, so the event has probability 1 / (2 + xi)
    let s1 = DensityOperator::pure(UnitVector::basis(2, 0).unwrap());
    let s2 = DensityOperator::pure(UnitVector::basis(2, 1).unwrap());
    let rho = DensityOperator::maximally_mixed(2).unwrap();
    let samples = 40_000u64;
    let out = distinguishing_probability_estimate(&s1, &s2, &rho, &[0.0, 1.0], samples, SeedStream::new(5)).unwrap();
    for (xi, freq) in out {
        let p = 1.0 / (2.0 + xi);
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        assert!((freq - p).abs() <= 3.0 * se, "xi={xi}: {freq} vs {p}");
    }
}

#[test]
fn anticoncentration_at_dimension_eight() {
    let r = projection_anticoncentration_check(8, 7, 50_000, SeedStream::new(1)).unwrap();
    let mean = r.detail["mean"];
    assert!((mean - 7.0 / 8.0).abs() <= 3.0 * r.detail["mean_stderr"]);
    let r = projection_anticoncentration_check(8, 4, 50_000, SeedStream::new(2)).unwrap();
    assert_eq!(r.status, CheckStatus::Passed);
    assert!(r.empirical > 0.0);
}

#[test]
fn validation_is_reproducible_and_passes() {
    let budget = SuiteBudget::default().scaled(0.02);
    let a = validate_all(5, &budget).unwrap();
    assert_eq!(a, validate_all(5, &budget).unwrap());
    for r in &a {
        assert!(r.passed, "{r:?}");
    }
}

use qfp_core::codes::{sample_code, CodeParams, QuasiLinearCode};
use qfp_core::fingerprint::overlap;
use qfp_core::protocols::{
    eavesdrop, one_way_equality, protocol_cost, smp_equality, swap_test_accept, ProtocolModel, Verdict,
};
use qfp_core::{BitString, Error, SeedStream};

fn code(n: usize, k: usize, r: usize, d: usize, seed: u64) -> QuasiLinearCode {
    sample_code(CodeParams::new(n, k, r, d).unwrap(), &mut SeedStream::new(seed).rng()).unwrap()
}

fn bits(v: u64, n: usize) -> BitString {
    BitString::from_u64(v, n).unwrap()
}

#[test]
fn equal_inputs_always_accept() {
    let c = code(8, 0, 6, 10, 1);
    let mut rng = SeedStream::new(2).rng();
    for x in [0u64, 17, 255] {
        let t = smp_equality(&c, &bits(x, 8), &bits(x, 8), 20, &mut rng).unwrap();
        assert_eq!(t.accept_probability, 1.0);
        assert_eq!((t.accepts, t.verdict), (20, Verdict::Equal));
        let t = one_way_equality(&c, 0, &bits(x, 8), &bits(x, 8), &mut rng).unwrap();
        assert_eq!(t.verdict, Verdict::Equal);
    }
}

#[test]
fn single_shot_frequency_matches_swap_test() {
    let c = code(8, 0, 6, 10, 3);
    let (x, y) = (bits(3, 8), bits(200, 8));
    let p = swap_test_accept(overlap(&c, &x, &y).unwrap());
    let mut rng = SeedStream::new(4).rng();
    let trials = 5000u64;
    let accepts: u64 = (0..trials)
        .map(|_| smp_equality(&c, &x, &y, 1, &mut rng).unwrap().accepts)
        .sum();
    let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
    assert!((accepts as f64 - trials as f64 * p).abs() <= 3.0 * sigma);
}

#[test]
fn acceptance_is_symmetric() {
    let c = code(6, 0, 4, 8, 5);
    let mut rng = SeedStream::new(0).rng();
    for (x, y) in [(1u64, 2u64), (9, 40), (63, 0)] {
        let a = smp_equality(&c, &bits(x, 6), &bits(y, 6), 1, &mut rng).unwrap();
        let b = smp_equality(&c, &bits(y, 6), &bits(x, 6), 1, &mut rng).unwrap();
        assert_eq!(a.accept_probability, b.accept_probability);
    }
}

#[test]
fn costs_count_qubits() {
    let c = code(6, 2, 4, 8, 5);
    let mut rng = SeedStream::new(0).rng();
    let t = one_way_equality(&c, 2, &bits(1, 6), &bits(2, 6), &mut rng).unwrap();
    assert_eq!(t.model, ProtocolModel::OneWay);
    assert_eq!(protocol_cost(&t), 8);
    let pure = code(6, 0, 4, 8, 5);
    let t = smp_equality(&pure, &bits(1, 6), &bits(2, 6), 3, &mut rng).unwrap();
    assert_eq!(t.model, ProtocolModel::Smp);
    assert_eq!(protocol_cost(&t), 16);
}

#[test]
fn invalid_inputs_are_rejected() {
    let mixed = code(6, 2, 4, 8, 5);
    let mut rng = SeedStream::new(0).rng();
    assert!(matches!(
        smp_equality(&mixed, &bits(1, 6), &bits(2, 6), 1, &mut rng),
        Err(Error::InvalidArgument(_))
    ));
    let pure = code(6, 0, 4, 8, 5);
    assert!(matches!(
        smp_equality(&pure, &bits(1, 6), &bits(2, 5), 1, &mut rng),
        Err(Error::LengthMismatch { expected: 6, got: 5 })
    ));
    assert!(smp_equality(&pure, &bits(1, 6), &bits(2, 6), 0, &mut rng).is_err());
}

#[test]
fn eavesdropper_learns_something() {
    let c = code(6, 0, 5, 8, 7);
    let r = eavesdrop(&c, 20, SeedStream::new(1)).unwrap();
    assert!(r.mean_bits > 0.0);
    assert!(r.mean_bits <= 6.0);
}

use proptest::prelude::*;
use qfp_core::classical::{
    classical_error, classical_fingerprint, classical_mi, classical_report, impossibility_bound, HashFamily,
    HashIndex, HashScheme,
};
use qfp_core::{BitString, Error, SeedStream};

fn affine(n: usize, m: usize) -> HashScheme {
    HashScheme::new(n, m, HashFamily::Gf2Affine, 0).unwrap()
}

/// Rank over GF(2) of the rows, by elimination.
fn gf2_rank(rows: &[u64]) -> u32 {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len() as u32
}

/// `E_A[rank A]` over all `m x n` matrices.
fn mean_rank(n: usize, m: usize) -> f64 {
    let count = 1u64 << (n * m);
    let mask = (1u64 << n) - 1;
    let total: u64 = (0..count)
        .map(|idx| {
            let rows: Vec<u64> = (0..m).map(|j| (idx >> (j * n)) & mask).collect();
            u64::from(gf2_rank(&rows))
        })
        .sum();
    total as f64 / count as f64
}

#[test]
fn gf2_rank_oracle_sanity() {
    assert_eq!(gf2_rank(&[0b011, 0b101, 0b110]), 2);
    assert_eq!(gf2_rank(&[0b001, 0b010, 0b100]), 3);
    assert_eq!(gf2_rank(&[0, 0]), 0);
}

#[test]
fn collision_probability_matches_full_enumeration() {
    // every (A, b) with n = 4, m = 2
    let s = affine(4, 2);
    for z in 0..16u64 {
        let mut hits = 0u64;
        let mut total = 0u64;
        for a in 0..1u64 << 8 {
            for b in 0..4u64 {
                let idx = HashIndex {
                    rows: vec![a & 0xf, a >> 4],
                    offset: b,
                };
                total += 1;
                hits += u64::from(s.hash(&idx, 5) == s.hash(&idx, 5 ^ z));
            }
        }
        assert_eq!(s.collision_probability(z), hits as f64 / total as f64);
    }
}

#[test]
fn collision_probability_by_row_counting() {
    for n in 1..=8usize {
        for m in 1..=6usize {
            let s = affine(n, m);
            for z in 1..1u64 << n {
                let orth = (0..1u64 << n).filter(|r| (r & z).count_ones() % 2 == 0).count();
                let want = (orth as f64 / (1u64 << n) as f64).powi(m as i32);
                assert_eq!(s.collision_probability(z), want);
            }
        }
    }
}

#[test]
fn affine_error_is_two_to_minus_m() {
    for (n, m) in [(4, 1), (4, 3), (6, 3), (5, 4)] {
        let e = classical_error(&affine(n, m)).unwrap();
        assert_eq!(e.eps_plus, 0.5f64.powi(m as i32));
        assert_eq!(e.eps_minus, 0.0);
    }
}

#[test]
fn affine_leakage_is_expected_rank() {
    for (n, m) in [(3, 2), (4, 3), (6, 3), (5, 4)] {
        let mi = classical_mi(&affine(n, m)).unwrap();
        assert!((mi - mean_rank(n, m)).abs() < 1e-12, "n={n} m={m}: {mi}");
    }
}

#[test]
fn degenerate_families_meet_the_bound() {
    let id = classical_report(&HashScheme::new(5, 5, HashFamily::Identity, 0).unwrap()).unwrap();
    assert_eq!((id.eps_plus, id.mi_bits, id.lower_bound_bits), (0.0, 5.0, 5.0));
    assert!(id.bound_holds);
    let c = classical_report(&HashScheme::new(5, 2, HashFamily::Constant, 0).unwrap()).unwrap();
    assert_eq!((c.eps_plus, c.mi_bits, c.lower_bound_bits), (1.0, 0.0, 0.0));
    assert!(c.bound_holds);
}

#[test]
fn bound_formula_examples() {
    assert_eq!(impossibility_bound(0.25, 0.0, 8).unwrap().bits, 2.0);
    assert_eq!(impossibility_bound(0.125, 0.5, 8).unwrap().bits, 1.5);
    let zero = impossibility_bound(0.0, 0.3, 7).unwrap();
    assert!(zero.zero_error_convention);
    assert_eq!(zero.bits, 7.0);
    assert!(matches!(impossibility_bound(1.5, 0.0, 4), Err(Error::InvalidArgument(_))));
}

#[test]
fn invalid_schemes_are_rejected() {
    assert!(matches!(HashScheme::new(4, 3, HashFamily::Identity, 0), Err(Error::InvalidArgument(_))));
    assert!(matches!(classical_mi(&affine(12, 2)), Err(Error::ScaleGuard(_))));
    assert!(matches!(classical_error(&affine(8, 3)), Err(Error::ScaleGuard(_))));
}

#[test]
fn fingerprint_is_hash_of_input() {
    let s = affine(6, 3);
    let x = BitString::from_u64(0b101101, 6).unwrap();
    let (idx, h) = classical_fingerprint(&s, &x, &mut SeedStream::new(4).rng()).unwrap();
    assert_eq!(h.len(), 3);
    assert_eq!(h.to_u64().unwrap(), s.hash(&idx, 0b101101));
    assert!(matches!(
        classical_fingerprint(&s, &BitString::zeros(5), &mut SeedStream::new(4).rng()),
        Err(Error::LengthMismatch { expected: 6, got: 5 })
    ));
}

proptest! {
    #[test]
    fn affine_hash_is_affine(rows in proptest::collection::vec(0u64..64, 3), b in 0u64..8, x in 0u64..64, y in 0u64..64) {
        let s = affine(6, 3);
        let idx = HashIndex { rows, offset: b };
        prop_assert_eq!(s.hash(&idx, x) ^ s.hash(&idx, y), s.hash(&idx, x ^ y) ^ s.hash(&idx, 0));
    }
}

//! Classical fingerprints `x -> (s, h_s(x))` and the classical no-go bound.
//!
//! The main family is `h_{A,b}(x) = A x xor b` over GF(2). The offset `b`
//! permutes the output alphabet without changing any preimage, so collision
//! probabilities and the mutual information depend on `A` alone and the
//! exhaustive routines enumerate `A` only.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::parallel;

/// Largest `n` for exhaustive scans.
pub const EXHAUSTIVE_N_LIMIT: usize = 10;
/// Largest `log2` of the enumerated index space.
pub const INDEX_SPACE_LIMIT_BITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashFamily {
    /// `A x xor b` with `A` uniform in `GF(2)^{m x n}` and `b` uniform.
    Gf2Affine,
    /// `h(x) = x`; requires `m = n`.
    Identity,
    /// `h(x) = 0`.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashScheme {
    pub n: usize,
    pub m: usize,
    pub family: HashFamily,
    pub family_seed: u64,
}

/// A family member: `rows[j]` is row `j` of `A`, `offset` is `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashIndex {
    pub rows: Vec<u64>,
    pub offset: u64,
}

fn parity(x: u64) -> u64 {
    (x.count_ones() & 1) as u64
}

fn apply_rows(rows: &[u64], x: u64) -> u64 {
    rows.iter()
        .enumerate()
        .fold(0, |acc, (j, r)| acc | (parity(r & x) << j))
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl HashScheme {
    pub fn new(n: usize, m: usize, family: HashFamily, family_seed: u64) -> Result<Self> {
        if n == 0 || n > 63 || m > 63 {
            return Err(Error::InvalidArgument(format!(
                "hash needs 1 <= n <= 63 and m <= 63, got n = {n}, m = {m}"
            )));
        }
        if family == HashFamily::Identity && m != n {
            return Err(Error::InvalidArgument(format!(
                "identity hash needs m = n, got m = {m}, n = {n}"
            )));
        }
        Ok(Self {
            n,
            m,
            family,
            family_seed,
        })
    }

    pub fn hash(&self, s: &HashIndex, x: u64) -> u64 {
        match self.family {
            HashFamily::Gf2Affine => apply_rows(&s.rows, x) ^ s.offset,
            HashFamily::Identity => x,
            HashFamily::Constant => 0,
        }
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> HashIndex {
        match self.family {
            HashFamily::Gf2Affine => HashIndex {
                rows: (0..self.m).map(|_| rng.random::<u64>() & mask(self.n)).collect(),
                offset: rng.random::<u64>() & mask(self.m),
            },
            _ => HashIndex {
                rows: Vec::new(),
                offset: 0,
            },
        }
    }

    /// `log2` of the number of matrices `A` (the offset is not enumerated).
    fn matrix_space_bits(&self) -> usize {
        match self.family {
            HashFamily::Gf2Affine => self.n * self.m,
            _ => 0,
        }
    }

    fn check_exhaustive(&self) -> Result<()> {
        if self.n > EXHAUSTIVE_N_LIMIT {
            return Err(Error::ScaleGuard(format!(
                "exhaustive classical scans need n <= {EXHAUSTIVE_N_LIMIT}, got {}",
                self.n
            )));
        }
        if self.matrix_space_bits() > INDEX_SPACE_LIMIT_BITS {
            return Err(Error::ScaleGuard(format!(
                "family of 2^{} matrices exceeds 2^{INDEX_SPACE_LIMIT_BITS}",
                self.matrix_space_bits()
            )));
        }
        Ok(())
    }

    /// Matrix number `idx` in the enumeration order: row `j` is bits
    /// `j n .. (j+1) n` of `idx`.
    fn matrix(&self, idx: u64) -> Vec<u64> {
        (0..self.m).map(|j| (idx >> (j * self.n)) & mask(self.n)).collect()
    }

    /// `Pr_s[h_s(x) = h_s(x xor z)]`, exactly.
    ///
    /// Rows of a uniform `A` are independent, so for the affine family this
    /// is `(#{r : <r,z> = 0} / 2^n)^m`, which is `2^{-m}` for every `z != 0`.
    pub fn collision_probability(&self, z: u64) -> f64 {
        match self.family {
            HashFamily::Constant => 1.0,
            HashFamily::Identity => f64::from(u8::from(z == 0)),
            HashFamily::Gf2Affine => {
                if z == 0 {
                    return 1.0;
                }
                // exactly half the rows are orthogonal to a nonzero z
                0.5f64.powi(self.m as i32)
            }
        }
    }
}

pub fn classical_fingerprint<R: Rng + ?Sized>(
    scheme: &HashScheme,
    x: &BitString,
    rng: &mut R,
) -> Result<(HashIndex, BitString)> {
    if x.len() != scheme.n {
        return Err(Error::LengthMismatch {
            expected: scheme.n,
            got: x.len(),
        });
    }
    let s = scheme.sample_index(rng);
    let h = scheme.hash(&s, x.to_u64().expect("n < 64"));
    Ok((s, BitString::from_u64(h, scheme.m)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalError {
    pub eps_plus: f64,
    pub eps_minus: f64,
}

/// `eps_plus = max_{x != y} Pr_s[h_s(x) = h_s(y)]` by enumerating the
/// family. The collision event depends on `x xor y` only, so the scan runs
/// over nonzero differences `z`. `eps_minus = 0`: equal inputs always hash
/// equal.
pub fn classical_error(scheme: &HashScheme) -> Result<ClassicalError> {
    scheme.check_exhaustive()?;
    let count = 1u64 << scheme.matrix_space_bits();
    let inputs = 1u64 << scheme.n;
    let index_of = |idx: u64| HashIndex {
        rows: scheme.matrix(idx),
        offset: 0,
    };
    // collisions[z] = #{A : h_A(0) = h_A(z)}
    let per_matrix = parallel::map_range(count as usize, |idx| {
        let s = index_of(idx as u64);
        let h0 = scheme.hash(&s, 0);
        (1..inputs)
            .filter(|&z| scheme.hash(&s, z) == h0)
            .collect::<Vec<u64>>()
    });
    let mut collisions = vec![0u64; inputs as usize];
    for zs in per_matrix {
        for z in zs {
            collisions[z as usize] += 1;
        }
    }
    let worst = collisions[1..].iter().copied().max().unwrap_or(0);
    Ok(ClassicalError {
        eps_plus: worst as f64 / count as f64,
        eps_minus: 0.0,
    })
}

/// `n - E_s H(X | S = s, h_s(X))` in bits: for a fixed member, `X` given
/// its hash is uniform on the preimage.
fn conditional_entropy_bits(scheme: &HashScheme, s: &HashIndex) -> f64 {
    let mut sizes = std::collections::HashMap::new();
    for x in 0..1u64 << scheme.n {
        *sizes.entry(scheme.hash(s, x)).or_insert(0u64) += 1;
    }
    let total = (1u64 << scheme.n) as f64;
    sizes
        .values()
        .map(|&c| c as f64 / total * (c as f64).log2())
        .sum()
}

/// Exact `I(X; (S, h_S(X)))` in bits with `X` uniform.
pub fn classical_mi(scheme: &HashScheme) -> Result<f64> {
    scheme.check_exhaustive()?;
    let count = 1u64 << scheme.matrix_space_bits();
    let per_matrix = parallel::map_range(count as usize, |idx| {
        let s = HashIndex {
            rows: scheme.matrix(idx as u64),
            offset: 0,
        };
        conditional_entropy_bits(scheme, &s)
    });
    let mean: f64 = per_matrix.iter().sum::<f64>() / count as f64;
    Ok((scheme.n as f64 - mean).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpossibilityBound {
    pub bits: f64,
    /// `eps_plus = 0`: the fingerprint determines the input and `n` bits
    /// leak.
    pub zero_error_convention: bool,
}

/// `(1 - eps_minus) log2(1 / eps_plus)`, or `n` when `eps_plus = 0`.
pub fn impossibility_bound(eps_plus: f64, eps_minus: f64, n: usize) -> Result<ImpossibilityBound> {
    if !(0.0..=1.0).contains(&eps_plus) {
        return Err(Error::InvalidArgument(format!(
            "eps_plus must lie in [0, 1], got {eps_plus}"
        )));
    }
    if !(0.0..=1.0).contains(&eps_minus) {
        return Err(Error::InvalidArgument(format!(
            "eps_minus must lie in [0, 1], got {eps_minus}"
        )));
    }
    if eps_plus == 0.0 {
        return Ok(ImpossibilityBound {
            bits: n as f64,
            zero_error_convention: true,
        });
    }
    Ok(ImpossibilityBound {
        bits: (1.0 - eps_minus) * (1.0 / eps_plus).log2(),
        zero_error_convention: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLeakageReport {
    pub n: usize,
    pub m: usize,
    pub family: HashFamily,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub mi_bits: f64,
    pub lower_bound_bits: f64,
    pub bound_holds: bool,
}

pub fn classical_report(scheme: &HashScheme) -> Result<ClassicalLeakageReport> {
    let err = classical_error(scheme)?;
    let mi = classical_mi(scheme)?;
    let bound = impossibility_bound(err.eps_plus, err.eps_minus, scheme.n)?;
    Ok(ClassicalLeakageReport {
        n: scheme.n,
        m: scheme.m,
        family: scheme.family,
        eps_plus: err.eps_plus,
        eps_minus: err.eps_minus,
        mi_bits: mi,
        lower_bound_bits: bound.bits,
        bound_holds: mi >= bound.bits,
    })
}

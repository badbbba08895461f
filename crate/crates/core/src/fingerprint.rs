//! Pure and mixed fingerprints and their equality measurements.
//!
//! Fingerprint amplitudes are `sg(b_i) 2^{-d/2}` for a codeword `b`, so a
//! fingerprint is stored as its codeword (bit set means amplitude negative)
//! and every inner product between fingerprints is `1 - 2 d_H / 2^d`,
//! computed by popcount and exact in binary floating point.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::QuasiLinearCode;
use crate::error::{Error, Result};
use crate::linalg::{DensityOperator, UnitVector, C64, GRAM_SCHMIDT_TOL};
use crate::parallel;
use crate::rng::SeedStream;

/// Largest `n` for an exhaustive error scan.
pub const EXHAUSTIVE_SCAN_LIMIT: usize = 12;

/// `<u_a|u_b>` for the fingerprints of codewords `a` and `b`.
pub fn signed_overlap(a: &BitString, b: &BitString) -> f64 {
    1.0 - 2.0 * a.hamming(b) as f64 / a.len() as f64
}

fn sign_vector(codeword: &BitString) -> UnitVector {
    let amp = (codeword.len() as f64).sqrt().recip();
    let amps = codeword
        .iter()
        .map(|b| C64::new(if b { -amp } else { amp }, 0.0))
        .collect();
    UnitVector::new(amps).expect("sign vectors have unit norm")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureFingerprint {
    input: BitString,
    codeword: BitString,
}

impl PureFingerprint {
    pub fn input(&self) -> &BitString {
        &self.input
    }

    /// The codeword `C(input)`; bit `i` set means amplitude `i` is negative.
    pub fn signs(&self) -> &BitString {
        &self.codeword
    }

    pub fn dim(&self) -> usize {
        self.codeword.len()
    }

    pub fn amplitude(&self, i: usize) -> f64 {
        let amp = (self.dim() as f64).sqrt().recip();
        if self.codeword.get(i) {
            -amp
        } else {
            amp
        }
    }

    pub fn to_unit_vector(&self) -> UnitVector {
        sign_vector(&self.codeword)
    }

    /// `<u_self|u_other>`.
    pub fn inner(&self, other: &PureFingerprint) -> f64 {
        signed_overlap(&self.codeword, &other.codeword)
    }

    pub fn to_file(&self) -> FingerprintFile {
        FingerprintFile {
            input: self.input.to_hex(),
            k: 0,
            signs: vec![self.codeword.to_hex()],
        }
    }
}

pub fn pure_fingerprint(code: &QuasiLinearCode, x: &BitString) -> Result<PureFingerprint> {
    Ok(PureFingerprint {
        codeword: code.encode(x)?,
        input: x.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedFingerprint {
    input: BitString,
    k: usize,
    /// `u_{i∘a}` for `i = 0, 1, ..., 2^k - 1`.
    components: Vec<PureFingerprint>,
}

impl MixedFingerprint {
    pub fn input(&self) -> &BitString {
        &self.input
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn components(&self) -> &[PureFingerprint] {
        &self.components
    }

    pub fn weight(&self) -> f64 {
        (self.components.len() as f64).recip()
    }

    pub fn density_operator(&self) -> DensityOperator {
        let w = self.weight();
        DensityOperator::mixture(
            self.components
                .iter()
                .map(|c| (w, c.to_unit_vector()))
                .collect(),
        )
        .expect("uniform mixture of unit vectors")
    }

    pub fn to_file(&self) -> FingerprintFile {
        FingerprintFile {
            input: self.input.to_hex(),
            k: self.k,
            signs: self.components.iter().map(|c| c.codeword.to_hex()).collect(),
        }
    }
}

/// Codeword indices `i | a << k` of the mixed fingerprint of `a`.
fn mixed_indices(a: u64, k: usize) -> impl Iterator<Item = u64> {
    (0..1u64 << k).map(move |i| i | (a << k))
}

fn check_input(code: &QuasiLinearCode, a: &BitString, k: usize) -> Result<u64> {
    let p = code.params();
    if k != p.k {
        return Err(Error::InvalidArgument(format!(
            "code was built for k = {}, asked for k = {k}",
            p.k
        )));
    }
    if a.len() != p.n {
        return Err(Error::LengthMismatch {
            expected: p.n,
            got: a.len(),
        });
    }
    Ok(a.to_u64().expect("n fits in a word"))
}

pub fn mixed_fingerprint(code: &QuasiLinearCode, a: &BitString, k: usize) -> Result<MixedFingerprint> {
    let av = check_input(code, a, k)?;
    let len = code.params().message_len();
    let components = mixed_indices(av, k)
        .map(|x| PureFingerprint {
            input: BitString::from_u64(x, len).expect("message fits"),
            codeword: code.encode_index(x),
        })
        .collect();
    Ok(MixedFingerprint {
        input: a.clone(),
        k,
        components,
    })
}

/// `|2 d_H(C(x1), C(x2)) / 2^d - 1|`, from the Hamming distance alone.
pub fn overlap(code: &QuasiLinearCode, x1: &BitString, x2: &BitString) -> Result<f64> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch {
            expected: x1.len(),
            got: x2.len(),
        });
    }
    Ok(signed_overlap(&code.encode(x1)?, &code.encode(x2)?).abs())
}

/// Anything that is a uniform-or-weighted mixture of sign fingerprints.
pub trait SignMixture {
    fn sign_components(&self) -> Vec<(f64, &BitString)>;
}

impl SignMixture for PureFingerprint {
    fn sign_components(&self) -> Vec<(f64, &BitString)> {
        vec![(1.0, &self.codeword)]
    }
}

impl SignMixture for MixedFingerprint {
    fn sign_components(&self) -> Vec<(f64, &BitString)> {
        let w = self.weight();
        self.components.iter().map(|c| (w, &c.codeword)).collect()
    }
}

/// Projector onto `span{u_{i∘y}}`, held as Gram-Schmidt coefficients over
/// the spanning fingerprints: frame vector `j` is
/// `sum_l coefficients[j][l] u_{i_l∘y}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityProjector {
    target: BitString,
    spanning: Vec<BitString>,
    coefficients: Vec<Vec<f64>>,
    dropped: Vec<usize>,
}

/// Gram-Schmidt in coefficient space: identical arithmetic to the
/// recursion `v'_i = u_i - sum_{j<i} v_j <v_j|u_i>` but with inner products
/// read off the Gram matrix.
fn coefficient_gram_schmidt(spanning: &[BitString], tol: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let m = spanning.len();
    let gram: Vec<Vec<f64>> = spanning
        .iter()
        .map(|a| spanning.iter().map(|b| signed_overlap(a, b)).collect())
        .collect();
    // <sum_l s_l u_l | sum_l t_l u_l>
    let form = |s: &[f64], t: &[f64]| -> f64 {
        let mut acc = 0.0;
        for l in 0..m {
            if s[l] == 0.0 {
                continue;
            }
            for q in 0..m {
                acc += s[l] * gram[l][q] * t[q];
            }
        }
        acc
    };
    let mut frame: Vec<Vec<f64>> = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..m {
        let mut w = vec![0.0; m];
        w[i] = 1.0;
        for v in &frame {
            let proj = form(v, &w);
            for (wl, vl) in w.iter_mut().zip(v) {
                *wl -= proj * vl;
            }
        }
        let norm = form(&w, &w).max(0.0).sqrt();
        if norm < tol {
            dropped.push(i);
        } else {
            frame.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    (frame, dropped)
}

impl EqualityProjector {
    fn from_codewords(target: BitString, spanning: Vec<BitString>) -> Self {
        let (coefficients, dropped) = coefficient_gram_schmidt(&spanning, GRAM_SCHMIDT_TOL);
        Self {
            target,
            spanning,
            coefficients,
            dropped,
        }
    }

    pub fn target(&self) -> &BitString {
        &self.target
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn dropped_count(&self) -> usize {
        self.dropped.len()
    }

    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    /// `<v_j|u>` for frame vector `j` and the fingerprint of codeword `u`.
    pub fn frame_overlap(&self, j: usize, u: &BitString) -> f64 {
        self.coefficients[j]
            .iter()
            .zip(&self.spanning)
            .map(|(t, s)| t * signed_overlap(s, u))
            .sum()
    }

    /// The orthonormal frame as explicit vectors.
    pub fn frame(&self) -> Vec<UnitVector> {
        let dim = self.spanning.first().map_or(0, BitString::len);
        let amp = (dim as f64).sqrt().recip();
        self.coefficients
            .iter()
            .map(|t| {
                let mut out = vec![0.0; dim];
                for (c, s) in t.iter().zip(&self.spanning) {
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += if s.get(i) { -c * amp } else { c * amp };
                    }
                }
                UnitVector::normalized(out.into_iter().map(|x| C64::new(x, 0.0)).collect())
                    .expect("frame vectors are nonzero")
            })
            .collect()
    }

    /// `sum_j |<v_j|u>|^2`.
    fn accept_pure(&self, u: &BitString) -> f64 {
        (0..self.rank()).map(|j| self.frame_overlap(j, u).powi(2)).sum()
    }
}

pub fn equality_projector(code: &QuasiLinearCode, y: &BitString, k: usize) -> Result<EqualityProjector> {
    let yv = check_input(code, y, k)?;
    let spanning = mixed_indices(yv, k).map(|x| code.encode_index(x)).collect();
    Ok(EqualityProjector::from_codewords(y.clone(), spanning))
}

/// Exact `tr(P rho)`.
pub fn accept_probability<F: SignMixture + ?Sized>(fp: &F, proj: &EqualityProjector) -> Result<f64> {
    let comps = fp.sign_components();
    if let (Some((_, u)), Some(s)) = (comps.first(), proj.spanning.first()) {
        if u.len() != s.len() {
            return Err(Error::DimensionMismatch {
                expected: s.len(),
                got: u.len(),
            });
        }
    }
    Ok(comps.iter().map(|(w, u)| w * proj.accept_pure(u)).sum())
}

/// Number of accepts in `shots` independent runs of the measurement.
pub fn sample_verdict<F: SignMixture + ?Sized, R: Rng + ?Sized>(
    fp: &F,
    proj: &EqualityProjector,
    shots: u64,
    rng: &mut R,
) -> Result<u64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let p = accept_probability(fp, proj)?.clamp(0.0, 1.0);
    let dist = Binomial::new(shots, p).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanMode {
    /// Every ordered pair `x != y`.
    Exhaustive,
    /// Uniformly random pairs `x != y` drawn from `seed`; `eps_minus` is
    /// still checked at every sampled `y`.
    Sampled { pairs: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub pairs_scanned: u64,
    pub exhaustive: bool,
}

#[derive(Default, Clone, Copy)]
struct Partial {
    eps_plus: f64,
    eps_minus: f64,
    pairs: u64,
}

impl Partial {
    fn merge(self, o: Partial) -> Partial {
        Partial {
            eps_plus: self.eps_plus.max(o.eps_plus),
            eps_minus: self.eps_minus.max(o.eps_minus),
            pairs: self.pairs + o.pairs,
        }
    }
}

/// Worst-case false-accept and false-reject probabilities of the code's
/// equality measurement, over all pairs or a random sample of them.
pub fn error_scan(code: &QuasiLinearCode, mode: ScanMode) -> Result<ErrorReport> {
    let p = code.params();
    let k = p.k;
    let inputs = 1u64 << p.n;
    let codeword = |x: u64| code.encode_index(x);
    let spanning = |y: u64| -> Vec<BitString> { mixed_indices(y, k).map(codeword).collect() };
    let projector = |y: u64| EqualityProjector::from_codewords(BitString::zeros(0), spanning(y));
    let mixed_accept = |comps: &[BitString], proj: &EqualityProjector| -> f64 {
        let w = (comps.len() as f64).recip();
        comps.iter().map(|u| w * proj.accept_pure(u)).sum()
    };
    let total = match mode {
        ScanMode::Exhaustive => {
            if p.n > EXHAUSTIVE_SCAN_LIMIT {
                return Err(Error::ScaleGuard(format!(
                    "exhaustive scan needs n <= {EXHAUSTIVE_SCAN_LIMIT}, got {}",
                    p.n
                )));
            }
            let states: Vec<Vec<BitString>> = (0..inputs).map(spanning).collect();
            let per_y = parallel::map_range(inputs as usize, |y| {
                let proj = EqualityProjector::from_codewords(BitString::zeros(0), states[y].clone());
                let mut part = Partial {
                    eps_minus: 1.0 - mixed_accept(&states[y], &proj),
                    ..Partial::default()
                };
                for (x, comps) in states.iter().enumerate() {
                    if x != y {
                        part.eps_plus = part.eps_plus.max(mixed_accept(comps, &proj));
                        part.pairs += 1;
                    }
                }
                part
            });
            per_y.into_iter().fold(Partial::default(), Partial::merge)
        }
        ScanMode::Sampled { pairs, seed } => {
            if inputs < 2 {
                return Err(Error::InvalidArgument("need at least two inputs".into()));
            }
            let stream = SeedStream::new(seed);
            let per_pair = parallel::map_range(pairs as usize, |t| {
                let mut rng = stream.split(t as u64).rng();
                let y = rng.random_range(0..inputs);
                let x = (y + rng.random_range(1..inputs)) % inputs;
                let proj = projector(y);
                Partial {
                    eps_plus: mixed_accept(&spanning(x), &proj),
                    eps_minus: 1.0 - mixed_accept(&spanning(y), &proj),
                    pairs: 1,
                }
            });
            per_pair.into_iter().fold(Partial::default(), Partial::merge)
        }
    };
    Ok(ErrorReport {
        eps_plus: total.eps_plus.clamp(0.0, 1.0),
        eps_minus: total.eps_minus.clamp(0.0, 1.0),
        pairs_scanned: total.pairs,
        exhaustive: matches!(mode, ScanMode::Exhaustive),
    })
}

/// Serialized fingerprint: input and component codewords in hex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintFile {
    pub input: String,
    pub k: usize,
    pub signs: Vec<String>,
}

//! Information leakage of fingerprint ensembles.
//!
//! Everything here is in nats unless a name says bits. For a quasi-linear
//! code all quadratic forms `<v|rho'_a|v>` reduce to the projections
//! `g_x = <u_x|v>`, and [`project_all`] computes every `g_x` at once: for a
//! fixed nonlinear index `x1` the map `x2 -> g_{x1,x2}` is a Walsh-Hadamard
//! transform of `v` bucketed by linear column.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::QuasiLinearCode;
use crate::error::{Error, Result};
use crate::linalg::{
    haar_basis, haar_unit_vector, operator_norm_hermitian, pure_trace_distance, DensityOperator,
    OrthonormalBasis, UnitVector, C64,
};
use crate::parallel;
use crate::rng::SeedStream;

/// Largest `n` for which the ensemble is enumerated.
pub const LABEL_LIMIT_BITS: usize = 12;
/// Largest number of labels an explicit [`StateFamily`] may hold.
pub const MAX_LABELS: usize = 1 << LABEL_LIMIT_BITS;
/// Floor applied to probabilities before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;
/// Tolerance on POVM completeness and total weight.
pub const POVM_TOL: f64 = 1e-6;

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_ITERS: usize = 200;
/// Ascent stops once a step gains less than this.
pub const ASCENT_TOL: f64 = 1e-10;

fn xlnx_ratio(p: f64, scale: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * (scale * p).max(LOG_FLOOR).ln()
    }
}

fn entropy(ps: impl IntoIterator<Item = f64>) -> f64 {
    -ps.into_iter().map(|p| xlnx_ratio(p, 1.0)).sum::<f64>()
}

/// In-place unnormalized Walsh-Hadamard transform; `data.len()` is a power
/// of two.
pub fn fwht(data: &mut [C64]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

fn check_enumerable(code: &QuasiLinearCode, k: usize) -> Result<()> {
    let p = code.params();
    if k != p.k {
        return Err(Error::InvalidArgument(format!(
            "code was built for k = {}, asked for k = {k}",
            p.k
        )));
    }
    if p.n > LABEL_LIMIT_BITS {
        return Err(Error::ScaleGuard(format!(
            "ensemble enumeration needs n <= {LABEL_LIMIT_BITS}, got {}",
            p.n
        )));
    }
    Ok(())
}

fn check_dim(code: &QuasiLinearCode, dim: usize) -> Result<()> {
    let expected = code.params().codeword_len();
    if dim != expected {
        return Err(Error::DimensionMismatch { expected, got: dim });
    }
    Ok(())
}

/// `g_x = <u_x|v>` for every message `x`, indexed by `x`.
pub fn project_all(code: &QuasiLinearCode, v: &[C64]) -> Result<Vec<C64>> {
    check_dim(code, v.len())?;
    let p = code.params();
    if p.message_len() > 2 * LABEL_LIMIT_BITS {
        return Err(Error::ScaleGuard(format!(
            "projecting onto 2^{} fingerprints",
            p.message_len()
        )));
    }
    let m = p.linear_len();
    let rows = 1usize << p.r;
    let scale = (v.len() as f64).sqrt().recip();
    let cols = code.columns();
    let mut out = vec![C64::new(0.0, 0.0); 1 << p.message_len()];
    let mut bucket = vec![C64::new(0.0, 0.0); 1 << m];
    for x1 in 0..rows {
        bucket.iter_mut().for_each(|b| *b = C64::new(0.0, 0.0));
        let signs = &code.nonlinear_part()[x1];
        for (l, (&c, &vl)) in cols.iter().zip(v).enumerate() {
            if signs.get(l) {
                bucket[c as usize] -= vl;
            } else {
                bucket[c as usize] += vl;
            }
        }
        fwht(&mut bucket);
        for (s, h) in bucket.iter().enumerate() {
            out[x1 | (s << p.r)] = h * scale;
        }
    }
    Ok(out)
}

/// `sum_x beta_x u_x`, the adjoint of [`project_all`].
pub fn synthesize(code: &QuasiLinearCode, beta: &[C64]) -> Result<Vec<C64>> {
    let p = code.params();
    if beta.len() != 1 << p.message_len() {
        return Err(Error::LengthMismatch {
            expected: 1 << p.message_len(),
            got: beta.len(),
        });
    }
    let m = p.linear_len();
    let len = p.codeword_len();
    let scale = (len as f64).sqrt().recip();
    let cols = code.columns();
    let mut out = vec![C64::new(0.0, 0.0); len];
    let mut spectrum = vec![C64::new(0.0, 0.0); 1 << m];
    for x1 in 0..1usize << p.r {
        for (s, slot) in spectrum.iter_mut().enumerate() {
            *slot = beta[x1 | (s << p.r)];
        }
        fwht(&mut spectrum);
        let signs = &code.nonlinear_part()[x1];
        for (l, o) in out.iter_mut().enumerate() {
            let t = spectrum[cols[l] as usize];
            if signs.get(l) {
                *o -= t;
            } else {
                *o += t;
            }
        }
    }
    out.iter_mut().for_each(|o| *o *= scale);
    Ok(out)
}

/// `mu_v(a) = <v|rho'_a|v>` for every `a`, indexed by `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuDistribution {
    pub n: usize,
    pub values: Vec<f64>,
}

impl MuDistribution {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `sum_a mu(a) ln(2^n mu(a))`.
    pub fn functional(&self) -> f64 {
        let scale = (1u64 << self.n) as f64;
        self.values.iter().map(|&m| xlnx_ratio(m, scale)).sum()
    }
}

fn mu_from_projections(code: &QuasiLinearCode, g: &[C64]) -> MuDistribution {
    let p = code.params();
    let group = 1usize << p.k;
    let scale = 2f64.powi(p.d as i32 - p.n as i32 - p.k as i32);
    let values = g
        .chunks(group)
        .map(|c| scale * c.iter().map(C64::norm_sqr).sum::<f64>())
        .collect();
    MuDistribution { n: p.n, values }
}

pub fn mu_distribution(code: &QuasiLinearCode, k: usize, v: &UnitVector) -> Result<MuDistribution> {
    check_enumerable(code, k)?;
    let g = project_all(code, v.amplitudes())?;
    Ok(mu_from_projections(code, &g))
}

/// `sum_a mu_v(a) ln(2^n mu_v(a))`, the relative entropy of `mu_v` to
/// uniform when `mu_v` is normalized.
pub fn relent_functional(code: &QuasiLinearCode, k: usize, v: &UnitVector) -> Result<f64> {
    Ok(mu_distribution(code, k, v)?.functional())
}

/// `||sum_a rho'_a - I||`.
///
/// The sum has entry `2^{-r} sum_{x1} (-1)^{d_{x1,l} xor d_{x1,l'}}` where
/// `c_l = c_l'` and zero elsewhere, so the defect is the largest norm among
/// the blocks of equal columns, and exactly zero when all columns differ.
pub fn completeness_defect(code: &QuasiLinearCode, k: usize) -> Result<f64> {
    check_enumerable(code, k)?;
    let p = code.params();
    let mut groups: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
    for (l, &c) in code.columns().iter().enumerate() {
        groups.entry(c).or_default().push(l);
    }
    let rows = code.nonlinear_part();
    let scale = 2f64.powi(-(p.r as i32));
    let mut worst = 0.0f64;
    for members in groups.values().filter(|g| g.len() > 1) {
        let size = members.len();
        let mut block = DMatrix::<C64>::zeros(size, size);
        for a in 0..size {
            for b in a + 1..size {
                let (la, lb) = (members[a], members[b]);
                let agree = rows.iter().filter(|d| d.get(la) == d.get(lb)).count() as f64;
                let t = scale * (2.0 * agree - rows.len() as f64);
                block[(a, b)] = C64::new(t, 0.0);
                block[(b, a)] = C64::new(t, 0.0);
            }
        }
        worst = worst.max(operator_norm_hermitian(&block));
    }
    Ok(worst)
}

/// Result of [`functional_max`]: a lower bound on the true maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalMax {
    pub v: UnitVector,
    pub value: f64,
    pub restarts: usize,
    pub iters: usize,
}

/// One ascent step `v -> normalize(G v)`,
/// `G = sum_a (1 + ln(2^n mu_v(a))) rho'_a`. Returns `None` when `G v = 0`.
fn ascent_step(code: &QuasiLinearCode, g: &[C64], mu: &MuDistribution) -> Option<UnitVector> {
    let p = code.params();
    let scale = 2f64.powi(p.d as i32 - p.n as i32 - p.k as i32);
    let two_n = (1u64 << p.n) as f64;
    let beta: Vec<C64> = g
        .iter()
        .enumerate()
        .map(|(x, gx)| {
            let m = mu.values[x >> p.k];
            let w = 1.0 + (two_n * m).max(LOG_FLOOR).ln();
            gx * (scale * w)
        })
        .collect();
    let out = synthesize(code, &beta).ok()?;
    UnitVector::normalized(out).ok()
}

fn ascend(code: &QuasiLinearCode, start: UnitVector, iters: usize) -> Result<(UnitVector, f64)> {
    let mut v = start;
    let mut g = project_all(code, v.amplitudes())?;
    let mut mu = mu_from_projections(code, &g);
    let mut value = mu.functional();
    for _ in 0..iters {
        let Some(next) = ascent_step(code, &g, &mu) else {
            break;
        };
        let next_g = project_all(code, next.amplitudes())?;
        let next_mu = mu_from_projections(code, &next_g);
        let next_value = next_mu.functional();
        if next_value <= value {
            break;
        }
        let gain = next_value - value;
        v = next;
        g = next_g;
        mu = next_mu;
        value = next_value;
        if gain < ASCENT_TOL {
            break;
        }
    }
    Ok((v, value))
}

/// Multistart local ascent on the functional. Restart `i` starts from a
/// Haar vector drawn from `stream.split(i)`.
pub fn functional_max(
    code: &QuasiLinearCode,
    k: usize,
    restarts: usize,
    iters: usize,
    stream: SeedStream,
) -> Result<FunctionalMax> {
    check_enumerable(code, k)?;
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let dim = code.params().codeword_len();
    let runs = parallel::map_range(restarts, |i| {
        let start = haar_unit_vector(dim, &mut stream.split(i as u64).rng())?;
        ascend(code, start, iters)
    });
    let mut best: Option<(UnitVector, f64)> = None;
    for run in runs {
        let (v, value) = run?;
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((v, value));
        }
    }
    let (v, value) = best.expect("at least one restart");
    Ok(FunctionalMax {
        v,
        value,
        restarts,
        iters,
    })
}

/// `{alpha_j |v_j><v_j|}` with `sum_j alpha_j |v_j><v_j| = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOnePovm {
    elements: Vec<(f64, UnitVector)>,
}

impl RankOnePovm {
    pub fn new(elements: Vec<(f64, UnitVector)>) -> Result<Self> {
        let Some((_, first)) = elements.first() else {
            return Err(Error::InvalidPovm("no elements".into()));
        };
        let dim = first.dim();
        if let Some((_, v)) = elements.iter().find(|(_, v)| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        if let Some((a, _)) = elements.iter().find(|(a, _)| !(*a > 0.0)) {
            return Err(Error::InvalidPovm(format!("non-positive weight {a}")));
        }
        let povm = Self { elements };
        let total: f64 = povm.elements.iter().map(|(a, _)| a).sum();
        if (total - dim as f64).abs() > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "weights sum to {total}, expected {dim}"
            )));
        }
        let err = povm.completeness_error();
        if err > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "sum of elements is {err} away from identity"
            )));
        }
        Ok(povm)
    }

    /// The projective measurement in `basis`.
    pub fn from_basis(basis: &OrthonormalBasis) -> Result<Self> {
        Self::new(basis.vectors().iter().map(|v| (1.0, v.clone())).collect())
    }

    pub fn elements(&self) -> &[(f64, UnitVector)] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].1.dim()
    }

    /// `||sum_j alpha_j |v_j><v_j| - I||`.
    pub fn completeness_error(&self) -> f64 {
        let dim = self.dim();
        let mut sum = -DMatrix::<C64>::identity(dim, dim);
        for (a, v) in &self.elements {
            let col = v.as_column();
            sum += (&col * col.adjoint()) * C64::new(*a, 0.0);
        }
        operator_norm_hermitian(&sum)
    }
}

/// `J >= D` Gaussian vectors `w_j`, reshaped into a POVM by
/// `v_j ∝ S^{-1/2} w_j`, `alpha_j = |S^{-1/2} w_j|^2`, `S = sum_j |w_j><w_j|`.
pub fn random_rank_one_povm<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Result<RankOnePovm> {
    if count < dim {
        return Err(Error::InvalidArgument(format!(
            "a rank-one POVM on dimension {dim} needs at least {dim} elements, got {count}"
        )));
    }
    let ws = (0..count)
        .map(|_| haar_unit_vector(dim, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut s = DMatrix::<C64>::zeros(dim, dim);
    for w in &ws {
        let col = w.as_column();
        s += &col * col.adjoint();
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(s);
    if eig.eigenvalues.iter().any(|&e| e <= 1e-12) {
        return Err(Error::InvalidPovm("frame operator is singular".into()));
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::new(e.sqrt().recip(), 0.0)));
    let t = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    let elements = ws
        .iter()
        .map(|w| {
            let y = &t * w.as_column();
            let alpha = y.norm_squared();
            UnitVector::normalized(y.iter().copied().collect()).map(|v| (alpha, v))
        })
        .collect::<Result<Vec<_>>>()?;
    RankOnePovm::new(elements)
}

/// `I(A;J)` with `A` uniform and `p(j|a) = p[a][j]`, in nats.
pub fn mutual_information_table(p: &[Vec<f64>]) -> f64 {
    let labels = p.len();
    if labels == 0 {
        return 0.0;
    }
    let outcomes = p[0].len();
    let mut marginal = vec![0.0; outcomes];
    for row in p {
        for (m, q) in marginal.iter_mut().zip(row) {
            *m += q / labels as f64;
        }
    }
    let conditional: f64 = p.iter().map(|row| entropy(row.iter().copied())).sum::<f64>() / labels as f64;
    (entropy(marginal) - conditional).max(0.0)
}

/// Exact `I(A;J)` for the code's ensemble measured with `povm`, in nats.
pub fn mutual_information_povm(code: &QuasiLinearCode, k: usize, povm: &RankOnePovm) -> Result<f64> {
    check_enumerable(code, k)?;
    check_dim(code, povm.dim())?;
    let p = code.params();
    let err = povm.completeness_error();
    if err > POVM_TOL {
        return Err(Error::InvalidPovm(format!("completeness error {err}")));
    }
    let scale = 2f64.powi(p.n as i32 - p.d as i32);
    // columns[j][a] = alpha_j 2^{n-d} mu_{v_j}(a) = p(j|a)
    let columns = parallel::map_range(povm.elements().len(), |j| {
        let (alpha, v) = &povm.elements()[j];
        mu_distribution(code, k, v).map(|mu| mu.values.iter().map(|m| alpha * scale * m).collect::<Vec<_>>())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let table: Vec<Vec<f64>> = (0..1usize << p.n)
        .map(|a| columns.iter().map(|c| c[a]).collect())
        .collect();
    Ok(mutual_information_table(&table))
}

/// The convexity step bounding a POVM's information by the functional at
/// its own vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IaccCheck {
    pub mutual_information: f64,
    pub max_functional: f64,
    /// `sum_j (alpha_j / 2^d) F(v_j)`, equal to the mutual information when
    /// `sum_a rho'_a = I`.
    pub convex_combination: f64,
    pub holds: bool,
}

pub const IACC_SLACK: f64 = 1e-7;

pub fn iacc_bound_check(code: &QuasiLinearCode, k: usize, povm: &RankOnePovm) -> Result<IaccCheck> {
    if !code.distinct_columns() {
        return Err(Error::HypothesisViolated(
            "the bound needs pairwise distinct linear columns".into(),
        ));
    }
    let mi = mutual_information_povm(code, k, povm)?;
    let dim = code.params().codeword_len() as f64;
    let mut max_functional = f64::NEG_INFINITY;
    let mut convex = 0.0;
    for (alpha, v) in povm.elements() {
        let f = relent_functional(code, k, v)?;
        max_functional = max_functional.max(f);
        convex += alpha / dim * f;
    }
    Ok(IaccCheck {
        mutual_information: mi,
        max_functional,
        convex_combination: convex,
        holds: mi <= max_functional + IACC_SLACK,
    })
}

/// A labelled family of states on a common space.
pub trait Ensemble: Sync {
    fn dim(&self) -> usize;
    fn labels(&self) -> usize;
    /// `<v|rho(x)|v>` for every label `x`.
    fn outcome_weights(&self, v: &UnitVector) -> Vec<f64>;
}

/// An explicit list of density operators.
#[derive(Debug, Clone)]
pub struct StateFamily {
    states: Vec<DensityOperator>,
}

impl StateFamily {
    pub fn new(states: Vec<DensityOperator>) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::InvalidArgument("empty state family".into()));
        };
        if states.len() > MAX_LABELS {
            return Err(Error::ScaleGuard(format!(
                "{} labels exceed the limit {MAX_LABELS}",
                states.len()
            )));
        }
        let dim = first.dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.dim(),
            });
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }
}

impl Ensemble for StateFamily {
    fn dim(&self) -> usize {
        self.states[0].dim()
    }

    fn labels(&self) -> usize {
        self.states.len()
    }

    fn outcome_weights(&self, v: &UnitVector) -> Vec<f64> {
        self.states.iter().map(|s| s.expectation(v)).collect()
    }
}

/// The mixed fingerprints `{rho_a}` of a code, evaluated through
/// [`project_all`].
#[derive(Debug, Clone, Copy)]
pub struct MixedScheme<'a> {
    code: &'a QuasiLinearCode,
}

impl<'a> MixedScheme<'a> {
    pub fn new(code: &'a QuasiLinearCode) -> Result<Self> {
        check_enumerable(code, code.params().k)?;
        Ok(Self { code })
    }
}

impl Ensemble for MixedScheme<'_> {
    fn dim(&self) -> usize {
        self.code.params().codeword_len()
    }

    fn labels(&self) -> usize {
        1 << self.code.params().n
    }

    fn outcome_weights(&self, v: &UnitVector) -> Vec<f64> {
        let g = project_all(self.code, v.amplitudes()).expect("dimension checked by caller");
        let w = 2f64.powi(-(self.code.params().k as i32));
        g.chunks(1 << self.code.params().k)
            .map(|c| w * c.iter().map(C64::norm_sqr).sum::<f64>())
            .collect()
    }
}

/// Per-basis mutual information of the random-basis attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub per_basis_bits: Vec<f64>,
    pub mean_bits: f64,
    pub stderr_bits: f64,
    pub first_basis: u64,
}

impl ExtractionResult {
    fn from_values(first_basis: u64, per_basis_bits: Vec<f64>) -> Self {
        let n = per_basis_bits.len() as f64;
        let mean = per_basis_bits.iter().sum::<f64>() / n;
        let var = if per_basis_bits.len() > 1 {
            per_basis_bits.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean_bits: mean,
            stderr_bits: (var / n).sqrt(),
            per_basis_bits,
            first_basis,
        }
    }
}

/// Exact `I(X;J)` in bits for uniform `X` measured in `basis`.
pub fn basis_mutual_information<E: Ensemble + ?Sized>(ensemble: &E, basis: &OrthonormalBasis) -> Result<f64> {
    if basis.dim() != ensemble.dim() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.dim(),
            got: basis.dim(),
        });
    }
    let by_outcome: Vec<Vec<f64>> = basis
        .vectors()
        .iter()
        .map(|v| ensemble.outcome_weights(v))
        .collect();
    let table: Vec<Vec<f64>> = (0..ensemble.labels())
        .map(|x| by_outcome.iter().map(|w| w[x]).collect())
        .collect();
    Ok(mutual_information_table(&table) / std::f64::consts::LN_2)
}

/// Measures in Haar bases `first .. first + count`, basis `b` drawn from
/// `stream.split(b)`.
pub fn extraction_attack_from<E: Ensemble + ?Sized>(
    ensemble: &E,
    first: u64,
    count: usize,
    stream: SeedStream,
) -> Result<ExtractionResult> {
    if count == 0 {
        return Err(Error::InvalidArgument("bases must be at least 1".into()));
    }
    let dim = ensemble.dim();
    let values = parallel::map_range(count, |i| {
        let basis = haar_basis(dim, &mut stream.split(first + i as u64).rng())?;
        basis_mutual_information(ensemble, &basis)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(ExtractionResult::from_values(first, values))
}

pub fn extraction_attack<E: Ensemble + ?Sized>(
    ensemble: &E,
    bases: usize,
    stream: SeedStream,
) -> Result<ExtractionResult> {
    extraction_attack_from(ensemble, 0, bases, stream)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCheck {
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub const LIPSCHITZ_SLACK: f64 = 1e-7;

/// `|F(v) - F(w)| <= 2^{d-1} eps ln(2/eps)` with
/// `eps = || |v><v| - |w><w| ||_1`.
pub fn lipschitz_check(code: &QuasiLinearCode, k: usize, v: &UnitVector, w: &UnitVector) -> Result<LipschitzCheck> {
    if !code.distinct_columns() {
        return Err(Error::HypothesisViolated(
            "the bound needs pairwise distinct linear columns".into(),
        ));
    }
    let eps = pure_trace_distance(v, w);
    if eps > 2.0 / std::f64::consts::E {
        return Err(Error::HypothesisViolated(format!(
            "trace distance {eps} exceeds 2/e"
        )));
    }
    let lhs = (relent_functional(code, k, v)? - relent_functional(code, k, w)?).abs();
    let rhs = if eps > 0.0 {
        2f64.powi(code.params().d as i32 - 1) * eps * (2.0 / eps).ln()
    } else {
        0.0
    };
    Ok(LipschitzCheck {
        eps,
        lhs,
        rhs,
        holds: lhs <= rhs + LIPSCHITZ_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationMc {
    pub mean: f64,
    pub stderr: f64,
    pub bound: f64,
    pub samples: usize,
}

/// Monte Carlo mean over random codes of `max{0, mu_v(a0) ln(2^n mu_v(a0))}`;
/// code `s` is drawn from `stream.split(s)`. `bound` is `23 / 2^n`.
pub fn expectation_bound_mc(
    params: crate::codes::CodeParams,
    v: &UnitVector,
    a0: u64,
    samples: usize,
    stream: SeedStream,
) -> Result<ExpectationMc> {
    params.check_materializable()?;
    if v.dim() != params.codeword_len() {
        return Err(Error::DimensionMismatch {
            expected: params.codeword_len(),
            got: v.dim(),
        });
    }
    if params.n < 64 && a0 >> params.n != 0 {
        return Err(Error::InvalidArgument(format!("a0 = {a0} has more than n bits")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let two_n = 2f64.powi(params.n as i32);
    let scale = 2f64.powi(params.d as i32 - params.n as i32 - params.k as i32);
    let amp = (params.codeword_len() as f64).sqrt().recip();
    let terms = parallel::map_range(samples, |s| {
        let code = crate::codes::sample_code(params, &mut stream.split(s as u64).rng())?;
        let mut mu = 0.0;
        for i in 0..1u64 << params.k {
            let word = code.encode_index(i | (a0 << params.k));
            let g: C64 = v
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(l, a)| if word.get(l) { -a } else { *a })
                .sum();
            mu += (g * amp).norm_sqr();
        }
        mu *= scale;
        Ok(xlnx_ratio(mu, two_n).max(0.0))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let n = samples as f64;
    let mean = terms.iter().sum::<f64>() / n;
    let var = if samples > 1 {
        terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(ExpectationMc {
        mean,
        stderr: (var / n).sqrt(),
        bound: 23.0 / two_n,
        samples,
    })
}

/// Summary of a leakage run; `functional_max_nats` is a search estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub functional_max_nats: f64,
    pub iacc_bound_nats: f64,
    pub extraction_mi_bits: f64,
    pub extraction_stderr_bits: f64,
    pub bases: usize,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub estimate: bool,
}

/// Functional search and extraction attack on independent substreams of
/// `seed`.
pub fn leakage_report(
    code: &QuasiLinearCode,
    restarts: usize,
    iters: usize,
    bases: usize,
    seed: u64,
) -> Result<LeakageReport> {
    let stream = SeedStream::new(seed);
    let k = code.params().k;
    let fmax = functional_max(code, k, restarts, iters, stream.fork("functional"))?;
    let attack = extraction_attack(&MixedScheme::new(code)?, bases, stream.fork("extraction"))?;
    Ok(LeakageReport {
        functional_max_nats: fmax.value,
        iacc_bound_nats: fmax.value,
        extraction_mi_bits: attack.mean_bits,
        extraction_stderr_bits: attack.stderr_bits,
        bases,
        restarts,
        iters,
        seed,
        estimate: true,
    })
}

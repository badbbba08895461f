//! Numerical substrate: unit vectors, density operators, Haar sampling,
//! Gram-Schmidt and trace-norm utilities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Norm tolerance for [`UnitVector`] and trace/Hermiticity tolerance for
/// [`DensityOperator`].
pub const NORM_TOL: f64 = 1e-9;
/// Orthonormality tolerance for [`OrthonormalBasis`].
pub const ORTHO_TOL: f64 = 1e-8;
/// Residual norm below which Gram-Schmidt drops a vector.
pub const GRAM_SCHMIDT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    amps: Vec<C64>,
}

fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

impl UnitVector {
    /// Wraps amplitudes that already have unit norm (within [`NORM_TOL`]).
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let n = norm_sqr(&amps).sqrt();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "vector norm {n} is not 1 within {NORM_TOL}"
            )));
        }
        Ok(Self { amps })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let n = norm_sqr(&amps).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        let inv = 1.0 / n;
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &UnitVector) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn as_column(&self) -> DMatrix<C64> {
        DMatrix::from_column_slice(self.dim(), 1, &self.amps)
    }

    /// `|v><v|` as a dense matrix.
    pub fn projector(&self) -> DMatrix<C64> {
        let col = self.as_column();
        &col * col.adjoint()
    }
}

/// A density operator, stored either as a weighted list of pure components
/// (preferred for low rank) or as a dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityOperator {
    Mixture { components: Vec<(f64, UnitVector)> },
    Dense(DMatrix<C64>),
}

impl DensityOperator {
    pub fn pure(v: UnitVector) -> Self {
        DensityOperator::Mixture {
            components: vec![(1.0, v)],
        }
    }

    pub fn mixture(components: Vec<(f64, UnitVector)>) -> Result<Self> {
        let dim = components
            .first()
            .map(|(_, v)| v.dim())
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let mut total = 0.0;
        for (w, v) in &components {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(DensityOperator::Mixture { components })
    }

    /// Validates Hermiticity, positivity and unit trace.
    pub fn dense(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let herm_err = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian (deviation {herm_err})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("trace {tr} is not 1")));
        }
        let min_eig = hermitian_eigenvalues(&m)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix has negative eigenvalue {min_eig}"
            )));
        }
        Ok(DensityOperator::Dense(m))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(DensityOperator::Dense(
            DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        ))
    }

    pub fn dim(&self) -> usize {
        match self {
            DensityOperator::Mixture { components } => components[0].1.dim(),
            DensityOperator::Dense(m) => m.nrows(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            DensityOperator::Mixture { components } => {
                let d = self.dim();
                let mut m = DMatrix::zeros(d, d);
                for (w, v) in components {
                    m += v.projector() * C64::new(*w, 0.0);
                }
                m
            }
            DensityOperator::Dense(m) => m.clone(),
        }
    }

    /// `<v|rho|v>`.
    pub fn expectation(&self, v: &UnitVector) -> f64 {
        match self {
            DensityOperator::Mixture { components } => components
                .iter()
                .map(|(w, u)| w * u.inner(v).norm_sqr())
                .sum(),
            DensityOperator::Dense(m) => {
                let col = v.as_column();
                (col.adjoint() * m * &col)[(0, 0)].re
            }
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            DensityOperator::Mixture { components } => components.iter().map(|(w, _)| w).sum(),
            DensityOperator::Dense(m) => m.trace().re,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: Vec<UnitVector>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<UnitVector>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for v in &vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
        }
        let basis = Self { vectors };
        let err = basis.orthonormality_error();
        if err > ORTHO_TOL {
            return Err(Error::InvalidArgument(format!(
                "vectors are not orthonormal (max deviation {err})"
            )));
        }
        Ok(basis)
    }

    pub fn computational(dim: usize) -> Result<Self> {
        let vectors = (0..dim)
            .map(|i| UnitVector::basis(dim, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vectors)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[UnitVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<UnitVector> {
        self.vectors
    }

    /// `max_{i,j} |<v_i|v_j> - delta_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random unit vector: independent standard normal real and imaginary
/// parts, then normalized.
pub fn haar_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitVector> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let amps = (0..dim).map(|_| complex_normal(rng)).collect();
    UnitVector::normalized(amps)
}

/// Haar-random orthonormal basis: QR of a complex Ginibre matrix with the
/// diagonal of R rotated to be real positive. Returns the columns of Q.
pub fn haar_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<OrthonormalBasis> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = g.qr();
    let r = qr.r();
    let q = qr.q();
    let vectors = (0..dim)
        .map(|j| {
            let rjj = r[(j, j)];
            let phase = if rjj.norm() > 0.0 {
                rjj / rjj.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            let col: Vec<C64> = q.column(j).iter().map(|&z| z * phase).collect();
            UnitVector::normalized(col)
        })
        .collect::<Result<Vec<_>>>()?;
    OrthonormalBasis::new(vectors)
}

/// Result of [`gram_schmidt`].
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    /// Orthonormal output, in input order with dropped entries skipped.
    pub vectors: Vec<UnitVector>,
    /// `coefficients[j][i]`: weight of input `i` in output `j`, so that
    /// `vectors[j] = sum_i coefficients[j][i] * inputs[i]`.
    pub coefficients: Vec<Vec<C64>>,
    /// Input indices whose residual norm fell below the tolerance.
    pub dropped: Vec<usize>,
}

/// Sequential orthonormalization `v'_i = u_i - sum_{j<i} v_j <v_j|u_i>`,
/// `v_i = v'_i / |v'_i|`. A vector whose residual norm is below `tol` is
/// dropped and its index recorded.
pub fn gram_schmidt(inputs: &[UnitVector], tol: f64) -> Result<GramSchmidt> {
    let mut out = GramSchmidt {
        vectors: Vec::new(),
        coefficients: Vec::new(),
        dropped: Vec::new(),
    };
    let Some(first) = inputs.first() else {
        return Ok(out);
    };
    let dim = first.dim();
    let count = inputs.len();
    for (i, u) in inputs.iter().enumerate() {
        if u.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: u.dim(),
            });
        }
        let mut residual = u.amplitudes().to_vec();
        let mut coeff = vec![C64::new(0.0, 0.0); count];
        coeff[i] = C64::new(1.0, 0.0);
        for (v, t) in out.vectors.iter().zip(&out.coefficients) {
            let c: C64 = v
                .amplitudes()
                .iter()
                .zip(&residual)
                .map(|(a, b)| a.conj() * b)
                .sum();
            for (r, a) in residual.iter_mut().zip(v.amplitudes()) {
                *r -= c * a;
            }
            for (k, tk) in coeff.iter_mut().zip(t) {
                *k -= c * tk;
            }
        }
        let norm = norm_sqr(&residual).sqrt();
        if norm < tol {
            out.dropped.push(i);
            continue;
        }
        let inv = 1.0 / norm;
        residual.iter_mut().for_each(|r| *r *= inv);
        coeff.iter_mut().for_each(|k| *k *= inv);
        out.vectors.push(UnitVector { amps: residual });
        out.coefficients.push(coeff);
    }
    Ok(out)
}

/// Orthogonal projector onto the span of orthonormal `frame`.
pub fn frame_projector(frame: &[UnitVector], dim: usize) -> DMatrix<C64> {
    let mut p = DMatrix::zeros(dim, dim);
    for v in frame {
        p += v.projector();
    }
    p
}

pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// Trace norm of a Hermitian matrix: sum of absolute eigenvalues.
pub fn trace_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

/// Operator norm of a Hermitian matrix: largest absolute eigenvalue.
pub fn operator_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .fold(0.0, |acc, e| acc.max(e.abs()))
}

/// `||s1 - s2||_1`, in `[0, 2]`.
pub fn trace_distance(s1: &DensityOperator, s2: &DensityOperator) -> Result<f64> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.dim(),
            got: s2.dim(),
        });
    }
    let diff = s1.to_dense() - s2.to_dense();
    Ok(trace_norm_hermitian(&diff).clamp(0.0, 2.0))
}

/// Trace distance between pure states, `2 sqrt(1 - |<v|w>|^2)`.
pub fn pure_trace_distance(v: &UnitVector, w: &UnitVector) -> f64 {
    2.0 * (1.0 - v.inner(w).norm_sqr()).max(0.0).sqrt()
}

//! Dense complex matrices and the handful of linear-algebra kernels the
//! rest of the crate is built on.

use std::ops::Deref;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square matrix with finite complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(CMatrix);

impl ComplexMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Row-major construction; panics on ragged input.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::new(CMatrix::from_fn(n, cols, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.0)
    }
}

impl Deref for ComplexMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

impl From<ComplexMatrix> for CMatrix {
    fn from(m: ComplexMatrix) -> Self {
        m.0
    }
}

/// Largest entry of `|M - M^dagger|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `(M + M^dagger) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `|u><v|`.
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// `<u|v>`, antilinear in the first slot.
#[inline]
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.dotc(v)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the orthonormal eigenvectors.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::NotSquare {
                rows: n,
                cols: m.ncols(),
            });
        }
        if n == 0 {
            return Ok(Self {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            });
        }
        let sym = hermitian_part(m);
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::EigensolverFailure(format!("no convergence for {n}x{n} Hermitian matrix")))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Self { values, vectors })
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Orthonormal basis of the span of `vectors`, by modified Gram-Schmidt with
/// one re-orthogonalization pass. Vectors whose residual norm drops below
/// `tol` are discarded.
pub fn orthonormalize(vectors: &[CVector], tol: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let proj = inner(q, &w);
                w -= q * proj;
            }
        }
        let nrm = w.norm();
        if nrm > tol {
            basis.push(w.unscale(nrm));
        }
    }
    basis
}

/// Completes `partial` (orthonormal columns) to a full orthonormal basis of
/// dimension `n` using the computational basis vectors as candidates.
pub fn complete_basis(partial: &[CVector], n: usize) -> Vec<CVector> {
    let mut all: Vec<CVector> = partial.to_vec();
    for k in 0..n {
        if all.len() == n {
            break;
        }
        let mut e = CVector::zeros(n);
        e[k] = C64::new(1.0, 0.0);
        let mut w = e;
        for _ in 0..2 {
            for q in &all {
                let proj = inner(q, &w);
                w -= q * proj;
            }
        }
        let nrm = w.norm();
        if nrm > 1e-8 {
            all.push(w.unscale(nrm));
        }
    }
    all
}

pub fn columns_to_matrix(cols: &[CVector], n: usize) -> CMatrix {
    CMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Hermitian generator, either dense or diagonal in the computational basis.
#[derive(Debug, Clone)]
pub enum Generator {
    Dense { matrix: CMatrix, eigen: HermitianEigen },
    Diagonal(Vec<f64>),
}

impl Generator {
    /// Checks Hermiticity to `tol` (max entry of `|H - H^dagger|`).
    pub fn dense(h: &CMatrix, tol: f64) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::NotSquare {
                rows: h.nrows(),
                cols: h.ncols(),
            });
        }
        let deviation = hermitian_deviation(h);
        if deviation > tol {
            return Err(Error::GeneratorNotHermitian { deviation });
        }
        let matrix = hermitian_part(h);
        let eigen = HermitianEigen::new(&matrix)?;
        Ok(Self::Dense { matrix, eigen })
    }

    pub fn diagonal(values: Vec<f64>) -> Self {
        Self::Diagonal(values)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Dense { matrix, .. } => matrix.nrows(),
            Self::Diagonal(d) => d.len(),
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        match self {
            Self::Dense { matrix, .. } => matrix.clone(),
            Self::Diagonal(d) => CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| c(x, 0.0)))),
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        match self {
            Self::Dense { matrix, .. } => matrix * v,
            Self::Diagonal(d) => CVector::from_iterator(v.len(), v.iter().zip(d).map(|(z, &x)| z * x)),
        }
    }

    /// `exp(z H) v` for complex `z`.
    pub fn exp_apply(&self, z: C64, v: &CVector) -> CVector {
        match self {
            Self::Dense { eigen, .. } => {
                let mut coeffs = eigen.vectors.adjoint() * v;
                for (k, &lam) in eigen.values.iter().enumerate() {
                    coeffs[k] *= (z * lam).exp();
                }
                &eigen.vectors * coeffs
            }
            Self::Diagonal(d) => CVector::from_iterator(v.len(), v.iter().zip(d).map(|(a, &x)| a * (z * x).exp())),
        }
    }

    /// `exp(z H)` as a dense matrix.
    pub fn exp_matrix(&self, z: C64) -> CMatrix {
        match self {
            Self::Dense { eigen, .. } => eigen.map(|lam| (z * lam).exp()),
            Self::Diagonal(d) => {
                CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| (z * x).exp())))
            }
        }
    }
}

use std::cmp::Ordering;

use super::density::DensityMatrix;
use super::matrix::{outer, CMatrix, CVector, HermitianEigen, C64};
use crate::error::Result;

/// Default rank threshold, relative to the largest weight.
pub const DEFAULT_EPS_RANK: f64 = 1e-12;
/// Relative tolerance below which two weights count as degenerate.
pub const EPS_DEGENERATE: f64 = 1e-9;

/// Eigen-decomposition of a density matrix with weights in descending order.
#[derive(Debug, Clone)]
pub struct SpectralForm {
    pub weights: Vec<f64>,
    /// Column `i` is `|phi_i>`; always a full orthonormal basis.
    pub vectors: CMatrix,
    pub support_rank: usize,
    /// Absolute threshold actually used for the support decision.
    pub eps_rank_abs: f64,
}

/// Phase-normalizes `v` so its first component with modulus above 1e-12 is
/// real and positive.
pub fn fix_phase(v: &mut CVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

fn lexicographic(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Decomposes `rho`; `eps_rank` is relative to the largest weight.
pub fn spectral_decompose(rho: &DensityMatrix, eps_rank: f64) -> Result<SpectralForm> {
    spectral_decompose_matrix(rho.matrix(), eps_rank)
}

/// As [`spectral_decompose`] on an already validated Hermitian matrix.
pub fn spectral_decompose_matrix(rho: &CMatrix, eps_rank: f64) -> Result<SpectralForm> {
    let n = rho.nrows();
    let eig = HermitianEigen::new(rho)?;
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|k| {
            let mut v = eig.vectors.column(k).into_owned();
            fix_phase(&mut v);
            (eig.values[k].max(0.0), v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let pmax = pairs.first().map_or(0.0, |p| p.0);
    let tie = EPS_DEGENERATE * pmax.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[start].0 - pairs[end].0 <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        start = end;
    }

    let eps_rank_abs = eps_rank * pmax;
    let weights: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let support_rank = weights.iter().filter(|&&p| p > eps_rank_abs).count();
    let vectors = CMatrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    Ok(SpectralForm {
        weights,
        vectors,
        support_rank,
        eps_rank_abs,
    })
}

impl SpectralForm {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn in_support(&self, i: usize) -> bool {
        self.weights[i] > self.eps_rank_abs
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// `V^dagger M V`.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * m * &self.vectors
    }

    /// `V M V^dagger`.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        &self.vectors * m * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (i, &p) in self.weights.iter().enumerate() {
            let v = self.vector(i);
            m += outer(&v, &v) * C64::new(p, 0.0);
        }
        m
    }

    /// True when two support weights coincide within the degeneracy tolerance.
    pub fn has_degenerate_support_pairs(&self) -> bool {
        let pmax = self.weights.first().copied().unwrap_or(0.0);
        (0..self.support_rank).any(|i| {
            (i + 1..self.support_rank).any(|j| (self.weights[i] - self.weights[j]).abs() <= EPS_DEGENERATE * pmax)
        })
    }
}

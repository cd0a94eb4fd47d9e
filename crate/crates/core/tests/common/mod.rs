#![allow(dead_code)]

use qcrb_core::qstate::matrix::orthonormalize;
use qcrb_core::qstate::{c, CMatrix, CVector, ComplexMatrix, DensityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller keeps the helper independent of the library's sampler
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| c(gaussian(rng), gaussian(rng)))
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    let v = random_vector(rng, n);
    let norm = v.norm();
    v / c(norm, 0.0)
}

pub fn random_orthonormal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<CVector> {
    loop {
        let raw: Vec<CVector> = (0..k).map(|_| random_vector(rng, n)).collect();
        let basis = orthonormalize(&raw, 1e-8);
        if basis.len() == k {
            return basis;
        }
    }
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(gaussian(rng), gaussian(rng)))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    ComplexMatrix::new((&g + g.adjoint()) * c(0.5, 0.0)).unwrap()
}

/// Descending weights summing to one; consecutive differences are at
/// least `gap` before normalization.
pub fn separated_weights(rng: &mut ChaCha8Rng, k: usize, gap: f64) -> Vec<f64> {
    let mut w = vec![0.0; k];
    let mut acc = 0.0;
    for slot in w.iter_mut().rev() {
        acc += gap + rng.random_range(0.0..1.0);
        *slot = acc;
    }
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub struct RandomMixture {
    pub weights: Vec<f64>,
    pub vectors: Vec<CVector>,
    pub rho: DensityMatrix,
}

pub fn random_mixture(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> RandomMixture {
    let weights = separated_weights(rng, rank, 0.05);
    let vectors = random_orthonormal(rng, n, rank);
    let rho = DensityMatrix::mixture(&weights, &vectors).unwrap();
    RandomMixture { weights, vectors, rho }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

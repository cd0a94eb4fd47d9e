//! Eigen-curve families: constant weights `p_i` with smooth eigenvector
//! curves `|phi_i(theta)>` and their derivatives in a declared gauge.

use std::sync::Arc;

use super::matrix::{c, inner, outer, CMatrix, CVector, Generator, C64};
use crate::error::{Error, Result};

/// Eigenvectors and their derivatives at one parameter value.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub states: Vec<CVector>,
    pub derivatives: Vec<CVector>,
}

impl CurvePoint {
    /// Gram matrix of `[phi_1, .., phi_M, dphi_1, .., dphi_M]`.
    pub fn gram(&self) -> CMatrix {
        let all: Vec<&CVector> = self.states.iter().chain(self.derivatives.iter()).collect();
        let n = all.len();
        CMatrix::from_fn(n, n, |i, j| inner(all[i], all[j]))
    }
}

/// Smooth eigen-decomposition of a constant-weight family.
pub trait EigenCurves: Send + Sync {
    /// Hilbert-space dimension.
    fn dim(&self) -> usize;

    /// Constant weights, one per curve.
    fn weights(&self) -> &[f64];

    /// Curve vectors at `theta`. Large representations may refuse with
    /// `UnsupportedConfiguration` and provide only [`EigenCurves::gram`].
    fn point(&self, theta: f64) -> Result<CurvePoint>;

    /// Gram matrix of states then derivatives, see [`CurvePoint::gram`].
    fn gram(&self, theta: f64) -> Result<CMatrix> {
        Ok(self.point(theta)?.gram())
    }
}

/// Inner products needed by the eigen-form Fisher formulas.
#[derive(Debug, Clone)]
pub struct CurveOverlaps {
    pub weights: Vec<f64>,
    /// `state_deriv[(j, i)] = <phi_j | d phi_i>`.
    pub state_deriv: CMatrix,
    /// `deriv_deriv[(i, k)] = <d phi_i | d phi_k>`.
    pub deriv_deriv: CMatrix,
    /// `states[(j, i)] = <phi_j | phi_i>`, identity up to roundoff.
    pub states: CMatrix,
}

impl CurveOverlaps {
    pub fn from_gram(weights: &[f64], gram: &CMatrix) -> Result<Self> {
        let m = weights.len();
        if gram.nrows() != 2 * m || gram.ncols() != 2 * m {
            return Err(Error::DimensionMismatch {
                expected: 2 * m,
                found: gram.nrows(),
            });
        }
        Ok(Self {
            weights: weights.to_vec(),
            state_deriv: gram.view((0, m), (m, m)).into_owned(),
            deriv_deriv: gram.view((m, m), (m, m)).into_owned(),
            states: gram.view((0, 0), (m, m)).into_owned(),
        })
    }

    pub fn of(curves: &dyn EigenCurves, theta: f64) -> Result<Self> {
        Self::from_gram(curves.weights(), &curves.gram(theta)?)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Density matrix `sum_i p_i |phi_i><phi_i|` from a curve point.
pub fn assemble_rho(weights: &[f64], point: &CurvePoint) -> CMatrix {
    let n = point.states.first().map_or(0, |v| v.len());
    let mut m = CMatrix::zeros(n, n);
    for (&p, v) in weights.iter().zip(&point.states) {
        m += outer(v, v) * c(p, 0.0);
    }
    m
}

/// `sum_i p_i (|dphi_i><phi_i| + |phi_i><dphi_i|)` for constant weights.
pub fn assemble_drho(weights: &[f64], point: &CurvePoint) -> CMatrix {
    let n = point.states.first().map_or(0, |v| v.len());
    let mut m = CMatrix::zeros(n, n);
    for ((&p, v), dv) in weights.iter().zip(&point.states).zip(&point.derivatives) {
        let t = outer(dv, v);
        m += (&t + t.adjoint()) * c(p, 0.0);
    }
    m
}

/// Phase gauge `alpha(theta) = c1 theta + c2 theta^2` applied to one curve.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadraticGauge {
    pub c1: f64,
    pub c2: f64,
}

impl QuadraticGauge {
    fn phase(&self, theta: f64) -> f64 {
        self.c1 * theta + self.c2 * theta * theta
    }

    fn slope(&self, theta: f64) -> f64 {
        self.c1 + 2.0 * self.c2 * theta
    }
}

/// Curves `phi_i(theta) = e^{i alpha_i} exp(-i theta H) phi_i(0)` generated by
/// a Hermitian `H`, so `d phi_i = -i H phi_i + i alpha_i' phi_i`.
#[derive(Debug, Clone)]
pub struct GeneratedCurves {
    weights: Vec<f64>,
    initial: Vec<CVector>,
    generator: Arc<Generator>,
    gauges: Vec<QuadraticGauge>,
}

impl GeneratedCurves {
    /// `initial` must be orthonormal to 1e-10.
    pub fn new(weights: Vec<f64>, initial: Vec<CVector>, generator: Generator) -> Result<Self> {
        if weights.len() != initial.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: initial.len(),
            });
        }
        let n = generator.dim();
        for (i, v) in initial.iter().enumerate() {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            for (j, w) in initial.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                let ov = inner(v, w);
                if (ov - c(target, 0.0)).norm() > 1e-10 {
                    return Err(Error::NotNormalized { norm: ov.norm() });
                }
            }
        }
        for &p in &weights {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidWeight(p));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::TraceNotOne { trace: total });
        }
        let gauges = vec![QuadraticGauge::default(); weights.len()];
        Ok(Self {
            weights,
            initial,
            generator: Arc::new(generator),
            gauges,
        })
    }

    /// Same family with each curve multiplied by `exp(i alpha_i(theta))`.
    pub fn with_gauges(mut self, gauges: Vec<QuadraticGauge>) -> Result<Self> {
        if gauges.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                found: gauges.len(),
            });
        }
        self.gauges = gauges;
        Ok(self)
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }
}

impl EigenCurves for GeneratedCurves {
    fn dim(&self) -> usize {
        self.generator.dim()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn point(&self, theta: f64) -> Result<CurvePoint> {
        let mut states = Vec::with_capacity(self.initial.len());
        let mut derivatives = Vec::with_capacity(self.initial.len());
        for (v0, g) in self.initial.iter().zip(&self.gauges) {
            let phase = C64::from_polar(1.0, g.phase(theta));
            let v = self.generator.exp_apply(c(0.0, -theta), v0) * phase;
            let dv = self.generator.apply(&v) * c(0.0, -1.0) + &v * c(0.0, g.slope(theta));
            states.push(v);
            derivatives.push(dv);
        }
        Ok(CurvePoint { states, derivatives })
    }
}

use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qstate::matrix::{c, trace_product, CMatrix, C64};
use crate::qstate::{SpectralForm, TangentMatrix, EPS_DEGENERATE};

/// Distance from pi below which beta counts as pi.
pub const BETA_PI_TOLERANCE: f64 = 1e-9;
/// Largest diagonal tangent entry on the support tolerated at beta = pi.
pub const WEIGHT_DERIVATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogDerivativeVariant {
    HermitianSld,
    Nh1,
    Nh2,
}

/// Logarithmic derivative in the eigenbasis of `rho`.
#[derive(Debug, Clone)]
pub struct LogDerivative {
    pub matrix: CMatrix,
    /// Eigenvector matrix `V`; `V L V^dagger` is the computational-basis form.
    pub basis: CMatrix,
    pub weights: Vec<f64>,
    pub variant: LogDerivativeVariant,
    pub beta: Option<f64>,
    /// Entries left free by the defining equation, stored as zero.
    pub undetermined: BTreeSet<(usize, usize)>,
}

impl LogDerivative {
    pub fn computational(&self) -> CMatrix {
        &self.basis * &self.matrix * self.basis.adjoint()
    }

    fn rho_eigen(&self) -> CMatrix {
        CMatrix::from_fn(self.weights.len(), self.weights.len(), |i, j| {
            if i == j {
                c(self.weights[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    /// `Tr(rho L^dagger L)`.
    pub fn trace_rho_ldag_l(&self) -> f64 {
        let l = &self.matrix;
        trace_product(&self.rho_eigen(), &(l.adjoint() * l)).re
    }

    /// `Tr(rho L L)`.
    pub fn trace_rho_l_l(&self) -> C64 {
        let l = &self.matrix;
        trace_product(&self.rho_eigen(), &(l * l))
    }

    /// Left side of the defining equation, in the eigenbasis.
    pub fn defining_lhs(&self) -> CMatrix {
        let rho = self.rho_eigen();
        let l = &self.matrix;
        match self.variant {
            LogDerivativeVariant::HermitianSld => (l * &rho + &rho * l) * c(0.5, 0.0),
            LogDerivativeVariant::Nh1 => (l * &rho + &rho * l.adjoint()) * c(0.5, 0.0),
            LogDerivativeVariant::Nh2 => l * &rho,
        }
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(-BETA_PI_TOLERANCE..=PI + BETA_PI_TOLERANCE).contains(&beta) {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(())
}

pub(crate) fn beta_is_pi(beta: f64) -> bool {
    (beta - PI).abs() <= BETA_PI_TOLERANCE
}

fn pmax(spec: &SpectralForm) -> f64 {
    spec.weights.first().copied().unwrap_or(0.0)
}

/// Rejects beta = pi with varying weights.
pub(crate) fn check_weight_derivatives(spec: &SpectralForm, d: &CMatrix) -> Result<()> {
    let worst = (0..spec.dim())
        .filter(|&i| spec.in_support(i))
        .map(|i| d[(i, i)].norm())
        .fold(0.0, f64::max);
    if worst > WEIGHT_DERIVATIVE_TOLERANCE {
        return Err(Error::FcDivergence {
            max_weight_derivative: worst,
        });
    }
    Ok(())
}

/// Symmetric logarithmic derivative `L_ij = 2 D_ij / (p_i + p_j)`.
pub fn hermitian_sld(spec: &SpectralForm, drho: &TangentMatrix, eps_rank: f64) -> LogDerivative {
    let d = spec.to_eigenbasis(drho.matrix());
    let n = spec.dim();
    let thr = eps_rank * pmax(spec);
    let p = &spec.weights;
    let mut undetermined = BTreeSet::new();
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let den = p[i] + p[j];
            if den > thr {
                l[(i, j)] = d[(i, j)] * (2.0 / den);
            } else {
                undetermined.insert((i, j));
            }
        }
    }
    LogDerivative {
        matrix: l,
        basis: spec.vectors.clone(),
        weights: spec.weights.clone(),
        variant: LogDerivativeVariant::HermitianSld,
        beta: None,
        undetermined,
    }
}

/// `L_ij = 2 D_ij / (p_j + p_i e^{i beta})`, solving
/// `(L rho + rho L^dagger) / 2 = d rho` with `L^dagger = e^{i beta} L`.
pub fn log_derivative_nh1(
    spec: &SpectralForm,
    drho: &TangentMatrix,
    beta: f64,
    eps_rank: f64,
) -> Result<LogDerivative> {
    check_beta(beta)?;
    let beta = beta.clamp(0.0, PI);
    let d = spec.to_eigenbasis(drho.matrix());
    let at_pi = beta_is_pi(beta);
    if at_pi {
        check_weight_derivatives(spec, &d)?;
    }
    let n = spec.dim();
    let pm = pmax(spec);
    let thr = eps_rank * pm;
    let phase = C64::from_polar(1.0, beta);
    let p = &spec.weights;
    let mut undetermined = BTreeSet::new();
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let den = c(p[j], 0.0) + phase * p[i];
            let degenerate_at_pi = at_pi && (p[i] - p[j]).abs() <= EPS_DEGENERATE * pm;
            if !degenerate_at_pi && den.norm() > thr {
                l[(i, j)] = d[(i, j)] * 2.0 / den;
            } else {
                undetermined.insert((i, j));
            }
        }
    }
    Ok(LogDerivative {
        matrix: l,
        basis: spec.vectors.clone(),
        weights: spec.weights.clone(),
        variant: LogDerivativeVariant::Nh1,
        beta: Some(beta),
        undetermined,
    })
}

/// `L_ji = D_ji / p_i` on support columns, solving `L rho = d rho`.
pub fn log_derivative_nh2(spec: &SpectralForm, drho: &TangentMatrix, eps_rank: f64) -> LogDerivative {
    let d = spec.to_eigenbasis(drho.matrix());
    let n = spec.dim();
    let thr = eps_rank * pmax(spec);
    let p = &spec.weights;
    let mut undetermined = BTreeSet::new();
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if p[i] > thr {
                l[(j, i)] = d[(j, i)] / p[i];
            } else {
                undetermined.insert((j, i));
            }
        }
    }
    LogDerivative {
        matrix: l,
        basis: spec.vectors.clone(),
        weights: spec.weights.clone(),
        variant: LogDerivativeVariant::Nh2,
        beta: None,
        undetermined,
    }
}

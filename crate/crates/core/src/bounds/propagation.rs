use crate::error::{Error, Result};
use crate::fisher::{hermitian_sld, LocalSpectrum};
use crate::qstate::matrix::{c, frobenius, hermitian_part, trace_product, CMatrix};
use crate::qstate::{StateFamily, DEFAULT_EPS_RANK, DEFAULT_FD_STEP};

use super::observable::{check_dim, expectation_matrix, variance_matrix, Observable};

/// Relative level below which `d<A>/d theta` counts as zero.
pub const ZERO_SIGNAL_TOLERANCE: f64 = 1e-12;
/// Relative agreement required between the analytic and finite-difference
/// signal derivatives.
pub const DERIVATIVE_CHECK_TOLERANCE: f64 = 1e-5;

/// `Var(A) / |Tr(d rho A)|^2` from a state and its tangent.
pub fn error_propagation_local(rho: &CMatrix, drho: &CMatrix, a: &Observable) -> Result<f64> {
    check_dim(rho, a)?;
    let derivative = trace_product(drho, a.matrix()).norm();
    let scale = frobenius(a.matrix()) * frobenius(drho).max(1.0);
    if !(derivative > ZERO_SIGNAL_TOLERANCE * scale) {
        return Err(Error::ZeroSignalDerivative { derivative });
    }
    Ok(variance_matrix(rho, a)? / (derivative * derivative))
}

/// Error propagation at `theta`, with the analytic signal derivative checked
/// against a central difference of `<A>`.
pub fn error_propagation(family: &StateFamily, theta: f64, a: &Observable) -> Result<f64> {
    let rho = family.rho_at(theta)?;
    let drho = family.drho_at(theta)?;
    check_dim(rho.matrix(), a)?;
    let analytic = trace_product(drho.matrix(), a.matrix());
    let h = DEFAULT_FD_STEP;
    let plus = expectation_matrix(family.rho_at(theta + h)?.matrix(), a)?;
    let minus = expectation_matrix(family.rho_at(theta - h)?.matrix(), a)?;
    let fd = (plus - minus) / (2.0 * h);
    let tol = DERIVATIVE_CHECK_TOLERANCE * frobenius(a.matrix()).max(analytic.norm()).max(1.0);
    if (fd - analytic).norm() > tol {
        return Err(Error::DerivativeMismatch {
            analytic: analytic.norm(),
            finite_difference: fd.norm(),
        });
    }
    error_propagation_local(rho.matrix(), drho.matrix(), a)
}

/// Non-Hermitian measurement attaining `1/F2`: in the eigenbasis
/// `A_ij = scale * D_ij / p_j` on support columns, zero elsewhere.
pub fn optimal_measurement_nh2(local: &LocalSpectrum, scale: f64) -> Observable {
    let spec = &local.spec;
    let d = spec.to_eigenbasis(local.drho.matrix());
    let n = spec.dim();
    let mut a = CMatrix::zeros(n, n);
    for j in (0..n).filter(|&j| spec.in_support(j)) {
        for i in 0..n {
            a[(i, j)] = d[(i, j)] * (scale / spec.weights[j]);
        }
    }
    Observable::new(spec.from_eigenbasis(&a)).expect("finite")
}

/// Hermitian measurement attaining `1/F_H`: the scaled SLD.
pub fn optimal_measurement_sld(local: &LocalSpectrum, scale: f64) -> Observable {
    let l = hermitian_sld(&local.spec, &local.drho, DEFAULT_EPS_RANK).computational();
    Observable::new(hermitian_part(&l) * c(scale, 0.0)).expect("finite")
}

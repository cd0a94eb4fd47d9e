//! The three Fisher informations in two independent forms: gauge-free sums
//! over tangent matrix elements in the eigenbasis, and eigen-curve sums over
//! the overlaps `<phi_j|d phi_i>` and `<d phi_i|d phi_i>`.

use crate::error::{Error, Result};
use crate::qstate::matrix::{max_abs, CMatrix};
use crate::qstate::{CurveOverlaps, SpectralForm, TangentMatrix, EPS_DEGENERATE};

use super::log_derivative::{beta_is_pi, check_beta, check_weight_derivatives};

/// Negative results within this distance of zero are reported as zero.
pub const CLAMP_TOLERANCE: f64 = 1e-10;

pub(crate) fn clamp(x: f64) -> f64 {
    if (-CLAMP_TOLERANCE..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

fn tangent_in_eigenbasis(spec: &SpectralForm, drho: &TangentMatrix) -> CMatrix {
    spec.to_eigenbasis(drho.matrix())
}

fn threshold(spec: &SpectralForm, eps_rank: f64) -> f64 {
    eps_rank * spec.weights.first().copied().unwrap_or(0.0)
}

/// `sum_{p_i + p_j > eps} 2 |D_ij|^2 / (p_i + p_j)`.
pub fn qfi_hermitian(spec: &SpectralForm, drho: &TangentMatrix) -> f64 {
    let d = tangent_in_eigenbasis(spec, drho);
    let p = &spec.weights;
    let thr = threshold(spec, crate::qstate::DEFAULT_EPS_RANK);
    let mut total = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            let den = p[i] + p[j];
            if den > thr {
                total += 2.0 * d[(i, j)].norm_sqr() / den;
            }
        }
    }
    clamp(total)
}

/// `sum_{i in supp, j} 4 p_i |D_ij|^2 / (p_i^2 + p_j^2 + 2 p_i p_j cos beta)`.
///
/// At beta = pi the diagonal terms vanish with the weight derivatives and
/// degenerate support pairs need gauge data, so they are rejected unless the
/// tangent itself vanishes.
pub fn qfi_nh1_matrix(spec: &SpectralForm, drho: &TangentMatrix, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let d = tangent_in_eigenbasis(spec, drho);
    let p = &spec.weights;
    let pm = p.first().copied().unwrap_or(0.0);
    let cosb = beta.cos();
    let at_pi = beta_is_pi(beta);
    if at_pi {
        check_weight_derivatives(spec, &d)?;
        if spec.has_degenerate_support_pairs() && max_abs(&d) > 1e-12 {
            return Err(Error::GaugeDataRequired);
        }
    }
    let mut total = 0.0;
    for i in 0..p.len() {
        if !spec.in_support(i) {
            continue;
        }
        for j in 0..p.len() {
            if at_pi && (p[i] - p[j]).abs() <= EPS_DEGENERATE * pm {
                continue;
            }
            let den = p[i] * p[i] + p[j] * p[j] + 2.0 * p[i] * p[j] * cosb;
            if den > 0.0 {
                total += 4.0 * p[i] * d[(i, j)].norm_sqr() / den;
            }
        }
    }
    Ok(clamp(total))
}

/// `sum_{i in supp} (D^2)_ii / p_i`.
pub fn qfi_nh2_matrix(spec: &SpectralForm, drho: &TangentMatrix) -> f64 {
    let d = tangent_in_eigenbasis(spec, drho);
    let p = &spec.weights;
    let mut total = 0.0;
    for i in 0..p.len() {
        if !spec.in_support(i) {
            continue;
        }
        let row: f64 = (0..p.len()).map(|j| d[(i, j)].norm_sqr()).sum();
        total += row / p[i];
    }
    clamp(total)
}

fn support(ov: &CurveOverlaps) -> (Vec<usize>, f64) {
    let pm = ov.weights.iter().copied().fold(0.0, f64::max);
    let thr = crate::qstate::DEFAULT_EPS_RANK * pm;
    let idx = (0..ov.len()).filter(|&i| ov.weights[i] > thr).collect();
    (idx, pm)
}

/// Hermitian QFI from eigen-curve overlaps:
/// `sum_i 4 p_i <dphi_i|dphi_i> - sum_ij 8 p_i p_j / (p_i + p_j) |<phi_j|dphi_i>|^2`.
pub fn qfi_hermitian_eigen(ov: &CurveOverlaps) -> f64 {
    let (supp, _) = support(ov);
    let p = &ov.weights;
    let mut total = 0.0;
    for &i in &supp {
        total += 4.0 * p[i] * ov.deriv_deriv[(i, i)].re;
        for &j in &supp {
            total -= 8.0 * p[i] * p[j] / (p[i] + p[j]) * ov.state_deriv[(j, i)].norm_sqr();
        }
    }
    clamp(total)
}

/// Non-Hermitian QFI of the first kind from eigen-curve overlaps. The pair
/// coefficient is `4 p_i (p_i - p_j)^2 / (p_i^2 + p_j^2 + 2 p_i p_j cos beta) - 4 p_i`,
/// replaced by 0 at beta = pi for degenerate pairs including `i = j`.
pub fn qfi_nh1_eigen(ov: &CurveOverlaps, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let (supp, pm) = support(ov);
    let p = &ov.weights;
    let cosb = beta.cos();
    let at_pi = beta_is_pi(beta);
    let mut total = 0.0;
    for &i in &supp {
        total += 4.0 * p[i] * ov.deriv_deriv[(i, i)].re;
        for j in 0..ov.len() {
            let coeff = if at_pi && (p[i] - p[j]).abs() <= EPS_DEGENERATE * pm {
                0.0
            } else {
                let den = p[i] * p[i] + p[j] * p[j] + 2.0 * p[i] * p[j] * cosb;
                4.0 * p[i] * (p[i] - p[j]).powi(2) / den - 4.0 * p[i]
            };
            total += coeff * ov.state_deriv[(j, i)].norm_sqr();
        }
    }
    Ok(clamp(total))
}

/// Non-Hermitian QFI of the second kind from eigen-curve overlaps:
/// `sum_i p_i <dphi_i|dphi_i> + sum_ij p_j (p_j - 2 p_i) / p_i |<phi_j|dphi_i>|^2`.
pub fn qfi_nh2_eigen(ov: &CurveOverlaps) -> f64 {
    let (supp, _) = support(ov);
    let p = &ov.weights;
    let mut total = 0.0;
    for &i in &supp {
        total += p[i] * ov.deriv_deriv[(i, i)].re;
        for j in 0..ov.len() {
            total += p[j] * (p[j] - 2.0 * p[i]) / p[i] * ov.state_deriv[(j, i)].norm_sqr();
        }
    }
    clamp(total)
}

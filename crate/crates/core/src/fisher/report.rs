use crate::error::Result;
use crate::qstate::matrix::inner;
use crate::qstate::{
    spectral_decompose, CurveOverlaps, SpectralForm, StateFamily, TangentMatrix, DEFAULT_EPS_RANK, EPS_DEGENERATE,
};

use super::forms::{
    clamp, qfi_hermitian, qfi_hermitian_eigen, qfi_nh1_eigen, qfi_nh1_matrix, qfi_nh2_eigen, qfi_nh2_matrix,
};
use super::log_derivative::{check_beta, WEIGHT_DERIVATIVE_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FisherMethod {
    EigenForm,
    MatrixForm,
}

impl FisherMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::EigenForm => "eigen_form",
            Self::MatrixForm => "matrix_form",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherReport {
    pub f_h: f64,
    pub f_nh1: f64,
    pub f_nh2: f64,
    pub beta: f64,
    /// True when varying weights contributed a classical term.
    pub f_c_included: bool,
    pub degenerate_pairs_present: bool,
    pub method: FisherMethod,
}

/// Spectral data and tangent of a family at one point.
#[derive(Debug, Clone)]
pub struct LocalSpectrum {
    pub spec: SpectralForm,
    pub drho: TangentMatrix,
}

impl LocalSpectrum {
    pub fn of(family: &StateFamily, theta: f64) -> Result<Self> {
        let rho = family.rho_at(theta)?;
        Ok(Self {
            spec: spectral_decompose(&rho, DEFAULT_EPS_RANK)?,
            drho: family.drho_at(theta)?,
        })
    }

    fn weights_vary(&self) -> bool {
        let d = self.spec.to_eigenbasis(self.drho.matrix());
        (0..self.spec.dim()).any(|i| self.spec.in_support(i) && d[(i, i)].norm() > WEIGHT_DERIVATIVE_TOLERANCE)
    }
}

fn degenerate(weights: &[f64]) -> bool {
    let pm = weights.iter().copied().fold(0.0, f64::max);
    let thr = DEFAULT_EPS_RANK * pm;
    let supp: Vec<f64> = weights.iter().copied().filter(|&p| p > thr).collect();
    (0..supp.len()).any(|i| (i + 1..supp.len()).any(|j| (supp[i] - supp[j]).abs() <= EPS_DEGENERATE * pm))
}

/// `(F_H, F_H, F_H / 4)` for a normalized pure curve, with `F_H` from the
/// component of the derivative orthogonal to the state.
fn pure_state_values(family: &StateFamily, theta: f64) -> Option<Result<(f64, f64, f64)>> {
    let nu = family.nonunitary()?;
    Some((|| {
        let psi = nu.state(theta)?;
        let dpsi = nu.state_derivative(theta)?;
        let horizontal = &dpsi - &psi * inner(&psi, &dpsi);
        let f = clamp(4.0 * horizontal.norm_squared());
        Ok((f, f, 0.25 * f))
    })())
}

pub fn qfi_hermitian_family(family: &StateFamily, theta: f64) -> Result<f64> {
    if let Some(curves) = family.eigen_curves() {
        return Ok(qfi_hermitian_eigen(&CurveOverlaps::of(curves.as_ref(), theta)?));
    }
    if let Some(v) = pure_state_values(family, theta) {
        return Ok(v?.0);
    }
    let local = LocalSpectrum::of(family, theta)?;
    Ok(qfi_hermitian(&local.spec, &local.drho))
}

/// Non-Hermitian QFI of the first kind at `beta`.
pub fn qfi_nh1(family: &StateFamily, theta: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if let Some(curves) = family.eigen_curves() {
        return qfi_nh1_eigen(&CurveOverlaps::of(curves.as_ref(), theta)?, beta);
    }
    if let Some(v) = pure_state_values(family, theta) {
        return Ok(v?.1);
    }
    let local = LocalSpectrum::of(family, theta)?;
    qfi_nh1_matrix(&local.spec, &local.drho, beta)
}

/// Non-Hermitian QFI of the second kind.
pub fn qfi_nh2(family: &StateFamily, theta: f64) -> Result<f64> {
    if let Some(curves) = family.eigen_curves() {
        return Ok(qfi_nh2_eigen(&CurveOverlaps::of(curves.as_ref(), theta)?));
    }
    if let Some(v) = pure_state_values(family, theta) {
        return Ok(v?.2);
    }
    let local = LocalSpectrum::of(family, theta)?;
    Ok(qfi_nh2_matrix(&local.spec, &local.drho))
}

/// All three informations from one set of spectral or overlap data.
pub fn fisher_report(family: &StateFamily, theta: f64, beta: f64) -> Result<FisherReport> {
    check_beta(beta)?;
    if let Some(curves) = family.eigen_curves() {
        let ov = CurveOverlaps::of(curves.as_ref(), theta)?;
        return Ok(FisherReport {
            f_h: qfi_hermitian_eigen(&ov),
            f_nh1: qfi_nh1_eigen(&ov, beta)?,
            f_nh2: qfi_nh2_eigen(&ov),
            beta,
            f_c_included: false,
            degenerate_pairs_present: degenerate(&ov.weights),
            method: FisherMethod::EigenForm,
        });
    }
    if let Some(v) = pure_state_values(family, theta) {
        let (f_h, f_nh1, f_nh2) = v?;
        return Ok(FisherReport {
            f_h,
            f_nh1,
            f_nh2,
            beta,
            f_c_included: false,
            degenerate_pairs_present: false,
            method: FisherMethod::MatrixForm,
        });
    }
    let local = LocalSpectrum::of(family, theta)?;
    report_from_spectrum(&local, beta)
}

/// Matrix-form report on precomputed spectral data.
pub fn report_from_spectrum(local: &LocalSpectrum, beta: f64) -> Result<FisherReport> {
    Ok(FisherReport {
        f_h: qfi_hermitian(&local.spec, &local.drho),
        f_nh1: qfi_nh1_matrix(&local.spec, &local.drho, beta)?,
        f_nh2: qfi_nh2_matrix(&local.spec, &local.drho),
        beta,
        f_c_included: local.weights_vary(),
        degenerate_pairs_present: local.spec.has_degenerate_support_pairs(),
        method: FisherMethod::MatrixForm,
    })
}

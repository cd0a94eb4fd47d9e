//! Mixtures of the two GHZ states `(|a..a> +- |b..b>)/sqrt 2` encoded by
//! `exp(-i theta J_z)`, optionally with the lossy generator `J_z (1 - i gamma)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qstate::matrix::{c, CVector, Generator};
use crate::qstate::{eigen_curve_family, nonunitary_pure_family_with, GeneratedCurves, StateFamily};

use super::ClosedForms;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzConfig {
    pub n_ions: usize,
    /// Weight of the `+` state.
    pub p: f64,
    /// Loss rate of the signal generator; 0 is unitary.
    pub gamma: f64,
}

impl GhzConfig {
    pub fn new(n_ions: usize, p: f64) -> Self {
        Self { n_ions, p, gamma: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        if self.n_ions == 0 {
            return Err(Error::InvalidArgument("n_ions must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.p) || self.p.is_nan() {
            return Err(Error::InvalidWeight(self.p));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma = {}", self.gamma)));
        }
        if self.gamma > 0.0 && self.p != 1.0 {
            return Err(Error::UnsupportedConfiguration(
                "lossy signal is only defined for the pure state p = 1".into(),
            ));
        }
        Ok(())
    }
}

fn plus_minus(dim: usize, last: usize) -> (CVector, CVector) {
    let s = 0.5f64.sqrt();
    let mut plus = CVector::zeros(dim);
    let mut minus = CVector::zeros(dim);
    plus[0] = c(s, 0.0);
    plus[last] = c(s, 0.0);
    minus[0] = c(s, 0.0);
    minus[last] = c(-s, 0.0);
    (plus, minus)
}

fn build(cfg: &GhzConfig, dim: usize, jz: Vec<f64>) -> Result<StateFamily> {
    cfg.validate()?;
    let (plus, minus) = plus_minus(dim, dim - 1);
    let generator = Generator::diagonal(jz);
    if cfg.gamma > 0.0 {
        return nonunitary_pure_family_with(&plus, generator, cfg.gamma);
    }
    let curves = GeneratedCurves::new(vec![cfg.p, 1.0 - cfg.p], vec![plus, minus], generator)?;
    Ok(eigen_curve_family(Arc::new(curves)))
}

/// Family on the two-dimensional span of `|a..a>` (J_z = -N/2) and
/// `|b..b>` (J_z = +N/2).
pub fn ghz_family(cfg: &GhzConfig) -> Result<StateFamily> {
    let half = cfg.n_ions as f64 / 2.0;
    build(cfg, 2, vec![-half, half])
}

/// The same family on the full `2^N`-dimensional register, with `J_z`
/// diagonal in the computational basis (bit 0 = `a`).
pub fn ghz_family_full(cfg: &GhzConfig) -> Result<StateFamily> {
    if cfg.n_ions > 16 {
        return Err(Error::UnsupportedConfiguration(format!(
            "full register for {} ions is too large",
            cfg.n_ions
        )));
    }
    let dim = 1usize << cfg.n_ions;
    let half = cfg.n_ions as f64 / 2.0;
    let jz = (0..dim).map(|k| k.count_ones() as f64 - half).collect();
    build(cfg, dim, jz)
}

/// `F_H = (1 - 4p(1-p)) N^2`, `F1 = N^2`, `F2 = (2p-1)^2 N^2 / (4p(1-p))`.
pub fn ghz_closed_forms(cfg: &GhzConfig) -> Result<ClosedForms> {
    cfg.validate()?;
    let p = cfg.p;
    if p == 0.0 || p == 1.0 {
        return Err(Error::DegenerateWeight(p));
    }
    let n2 = (cfg.n_ions * cfg.n_ions) as f64;
    Ok(ClosedForms {
        f_h: (1.0 - 4.0 * p * (1.0 - p)) * n2,
        f_nh1: n2,
        f_nh2: (2.0 * p - 1.0).powi(2) * n2 / (4.0 * p * (1.0 - p)),
    })
}

/// QFI of the normalized lossy pure family:
/// `N^2 (1 + gamma^2) (1 - tanh^2(gamma N theta))`.
pub fn ghz_nonunitary_qfi(n_ions: usize, gamma: f64, theta: f64) -> f64 {
    let n = n_ions as f64;
    let t = (gamma * n * theta).tanh();
    n * n * (1.0 + gamma * gamma) * (1.0 - t * t)
}

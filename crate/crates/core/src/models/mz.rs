//! Mach-Zehnder family `U(theta) B (S(r) |0>_a (x) D(alpha) |X_i>_b)` with
//! `X_1 = |0>`, `X_2 = |1>`, `U(theta) = exp(-i theta a^dagger a)` and a beam
//! splitter `B = exp(-i t (a b^dagger + a^dagger b))`.
//!
//! Curve overlaps are evaluated in the Heisenberg picture,
//! `B^dagger a^dagger a B = c^2 a^dagger a + s^2 b^dagger b - i c s a^dagger b + i c s a b^dagger`
//! with `c = cos t`, `s = sin t`, acting on product states, so only
//! single-mode vectors are ever stored. Dense two-mode vectors are built on
//! request for cross-checks and for the lossy pure family.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qstate::matrix::{c, CMatrix, CVector, Generator, C64};
use crate::qstate::{
    eigen_curve_family, nonunitary_pure_family_with, CurveOverlaps, CurvePoint, EigenCurves, StateFamily,
};

use super::fock::{
    apply_beam_splitter, coherent_amplitudes, displaced_one_amplitudes, lower, number, raise,
    squeezed_vacuum_amplitudes, ProductSum,
};
use super::ClosedForms;

/// Largest tolerated truncation tail of the prepared states.
pub const MAX_TAIL_MASS: f64 = 1e-10;
/// Bound on `sum_{n > n_max} (1 + n)^4 |c_n|^2` used by the automatic cutoff,
/// which controls the error of second moments of the photon number.
pub const MOMENT_TAIL: f64 = 1e-12;
/// Two-mode dimension above which dense vectors are refused.
const DENSE_LIMIT: usize = 4_000_000;
/// Cutoff above which the block-exponentiated balanced splitter is refused.
const BLOCK_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Splitter {
    /// Full transmission, `t = pi/2`.
    BPi,
    /// Balanced, `t = pi/4`.
    BPi2,
}

impl Splitter {
    pub fn angle(&self) -> f64 {
        match self {
            Self::BPi => FRAC_PI_2,
            Self::BPi2 => FRAC_PI_4,
        }
    }

    /// `(cos t, sin t)` with exact values.
    fn cos_sin(&self) -> (f64, f64) {
        match self {
            Self::BPi => (0.0, 1.0),
            Self::BPi2 => (0.5f64.sqrt(), 0.5f64.sqrt()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzConfig {
    pub alpha: C64,
    pub r_mag: f64,
    /// Squeezing phase: `r = r_mag e^{2 i phi}`.
    pub phi: f64,
    /// Weight of the `X_1 = |0>` branch.
    pub p: f64,
    pub splitter: Splitter,
    pub gamma: f64,
    /// Per-mode Fock cutoff; `None` chooses one automatically.
    pub n_max: Option<usize>,
}

impl MzConfig {
    pub fn new(alpha: C64, p: f64, splitter: Splitter) -> Self {
        Self {
            alpha,
            r_mag: 0.0,
            phi: 0.0,
            p,
            splitter,
            gamma: 0.0,
            n_max: None,
        }
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) || self.p.is_nan() {
            return Err(Error::InvalidWeight(self.p));
        }
        let finite = self.alpha.re.is_finite() && self.alpha.im.is_finite() && self.phi.is_finite();
        if !finite || !(self.r_mag >= 0.0) || !self.r_mag.is_finite() {
            return Err(Error::InvalidArgument("non-finite or negative model parameter".into()));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma = {}", self.gamma)));
        }
        if self.gamma > 0.0 && (self.p != 1.0 || self.splitter != Splitter::BPi) {
            return Err(Error::UnsupportedConfiguration(
                "lossy signal is only defined for the pure p = 1 state with the full-transmission splitter".into(),
            ));
        }
        if self.n_max == Some(0) {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(())
    }

    /// `|alpha|^2 + 10 |alpha| + 10 + 4 sinh^2 |r|`, rounded up.
    pub fn heuristic_n_max(&self) -> usize {
        let a = self.alpha.norm();
        (a * a + 10.0 * a + 10.0 + 4.0 * self.r_mag.sinh().powi(2)).ceil() as usize
    }
}

fn moment_suffix(amps: &[C64]) -> Vec<f64> {
    // suffix[n] = sum_{k >= n} (1 + k)^4 |c_k|^2
    let mut out = vec![0.0; amps.len() + 1];
    for k in (0..amps.len()).rev() {
        out[k] = out[k + 1] + (1.0 + k as f64).powi(4) * amps[k].norm_sqr();
    }
    out
}

fn single_mode_states(cfg: &MzConfig, len: usize) -> [Vec<C64>; 3] {
    [
        squeezed_vacuum_amplitudes(cfg.r_mag, cfg.phi, len),
        coherent_amplitudes(cfg.alpha, len),
        displaced_one_amplitudes(cfg.alpha, len),
    ]
}

/// Automatic cutoff: at least the heuristic, and large enough that every
/// single-mode factor has moment tail below [`MOMENT_TAIL`].
fn auto_n_max(cfg: &MzConfig) -> usize {
    let floor = cfg.heuristic_n_max();
    let mut len = (2 * floor).max(64);
    loop {
        let states = single_mode_states(cfg, len);
        let settled = states.iter().all(|s| {
            s[len - 8..]
                .iter()
                .enumerate()
                .all(|(k, z)| (1.0 + (len - 8 + k) as f64).powi(4) * z.norm_sqr() < 1e-30)
        });
        if settled {
            let needed = states
                .iter()
                .map(|s| {
                    let suffix = moment_suffix(s);
                    (0..len).find(|&n| suffix[n + 1] < MOMENT_TAIL).unwrap_or(len - 1)
                })
                .max()
                .unwrap_or(0);
            return needed.max(floor);
        }
        len *= 2;
    }
}

/// Prepared single-mode factors and the derived curve data.
#[derive(Debug, Clone)]
pub struct MzModel {
    cfg: MzConfig,
    n_max: usize,
    tail_mass: f64,
    /// `S(r)|0>` on mode a.
    squeezed: CVector,
    /// `D(alpha)|0>` and `D(alpha)|1>` on mode b.
    displaced: [CVector; 2],
    gram: CMatrix,
}

impl MzModel {
    pub fn new(cfg: &MzConfig) -> Result<Self> {
        cfg.validate()?;
        let n_max = match cfg.n_max {
            Some(n) => n,
            None => auto_n_max(cfg),
        };
        let [u, v1, v2] = single_mode_states(cfg, n_max + 1);
        let u_norm: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        let tail_mass = [&v1, &v2]
            .iter()
            .map(|v| (1.0 - u_norm * v.iter().map(|z| z.norm_sqr()).sum::<f64>()).max(0.0))
            .fold(0.0, f64::max);
        if tail_mass >= MAX_TAIL_MASS {
            return Err(Error::TruncationTooSmall { n_max, tail: tail_mass });
        }
        let mut model = Self {
            cfg: *cfg,
            n_max,
            tail_mass,
            squeezed: CVector::from_vec(u),
            displaced: [CVector::from_vec(v1), CVector::from_vec(v2)],
            gram: CMatrix::zeros(4, 4),
        };
        model.gram = model.heisenberg_gram();
        Ok(model)
    }

    pub fn config(&self) -> &MzConfig {
        &self.cfg
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Largest truncation tail `1 - ||P psi_i||^2` over both prepared states.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    fn prepared(&self, i: usize) -> ProductSum {
        ProductSum::product(self.squeezed.clone(), self.displaced[i].clone())
    }

    /// `B^dagger n_a B` applied to the prepared state `i`.
    fn heisenberg_number(&self, i: usize) -> ProductSum {
        let (cs, sn) = self.cfg.splitter.cos_sin();
        let u = &self.squeezed;
        let v = &self.displaced[i];
        let mut out = ProductSum::default();
        if cs != 0.0 {
            out.push(c(cs * cs, 0.0), number(u), v.clone());
            out.push(c(0.0, -cs * sn), raise(u), lower(v));
            out.push(c(0.0, cs * sn), lower(u), raise(v));
        }
        out.push(c(sn * sn, 0.0), u.clone(), number(v));
        out
    }

    fn heisenberg_gram(&self) -> CMatrix {
        let states = [self.prepared(0), self.prepared(1)];
        let moved = [self.heisenberg_number(0), self.heisenberg_number(1)];
        let mut g = CMatrix::zeros(4, 4);
        for j in 0..2 {
            for i in 0..2 {
                g[(j, i)] = states[j].inner(&states[i]);
                // <phi_j | d phi_i> = -i <psi_j | B^dagger n_a B | psi_i>
                let sd = states[j].inner(&moved[i]) * c(0.0, -1.0);
                g[(j, 2 + i)] = sd;
                g[(2 + i, j)] = sd.conj();
                g[(2 + j, 2 + i)] = moved[j].inner(&moved[i]);
            }
        }
        g
    }

    /// Gram matrix of `[phi_1, phi_2, d phi_1, d phi_2]`; independent of theta.
    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn overlaps(&self) -> CurveOverlaps {
        CurveOverlaps::from_gram(&[self.cfg.p, 1.0 - self.cfg.p], &self.gram).expect("4x4 gram")
    }

    /// Dense two-mode vector `B psi_i` with index `n_a (n_max + 1) + n_b`,
    /// plus the norm squared dropped by truncating total photon number.
    pub fn encoded_dense(&self, i: usize) -> Result<(CVector, f64)> {
        let d = self.n_max + 1;
        if d * d > DENSE_LIMIT || (self.cfg.splitter == Splitter::BPi2 && self.n_max > BLOCK_LIMIT) {
            return Err(Error::UnsupportedConfiguration(format!(
                "dense two-mode vectors at n_max = {}",
                self.n_max
            )));
        }
        let psi = self.prepared(i).to_dense(self.n_max);
        let complete_only = self.cfg.splitter == Splitter::BPi2;
        Ok(apply_beam_splitter(
            self.cfg.splitter.angle(),
            &psi,
            self.n_max,
            complete_only,
        ))
    }

    fn number_a_diagonal(&self) -> Vec<f64> {
        let d = self.n_max + 1;
        (0..d * d).map(|k| (k / d) as f64).collect()
    }

    pub fn family(&self) -> Result<StateFamily> {
        if self.cfg.gamma > 0.0 {
            let (v, _) = self.encoded_dense(0)?;
            let nrm = v.norm();
            return nonunitary_pure_family_with(
                &(v / c(nrm, 0.0)),
                Generator::diagonal(self.number_a_diagonal()),
                self.cfg.gamma,
            );
        }
        Ok(eigen_curve_family(Arc::new(MzCurves {
            model: self.clone(),
            weights: [self.cfg.p, 1.0 - self.cfg.p],
        })))
    }
}

/// Eigen-curve view of an [`MzModel`].
#[derive(Debug, Clone)]
struct MzCurves {
    model: MzModel,
    weights: [f64; 2],
}

impl EigenCurves for MzCurves {
    fn dim(&self) -> usize {
        (self.model.n_max + 1).pow(2)
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn point(&self, theta: f64) -> Result<CurvePoint> {
        let na = self.model.number_a_diagonal();
        let mut states = Vec::with_capacity(2);
        let mut derivatives = Vec::with_capacity(2);
        for i in 0..2 {
            let (v, _) = self.model.encoded_dense(i)?;
            let phased = CVector::from_fn(v.len(), |k, _| v[k] * C64::from_polar(1.0, -theta * na[k]));
            let deriv = CVector::from_fn(v.len(), |k, _| phased[k] * c(0.0, -na[k]));
            states.push(phased);
            derivatives.push(deriv);
        }
        Ok(CurvePoint { states, derivatives })
    }

    fn gram(&self, _theta: f64) -> Result<CMatrix> {
        Ok(self.model.gram.clone())
    }
}

pub fn mz_family(cfg: &MzConfig) -> Result<StateFamily> {
    MzModel::new(cfg)?.family()
}

/// Closed-form curve overlaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzOverlapIdentities {
    /// `<d phi_1|d phi_1>`.
    pub g11: f64,
    /// `<d phi_2|d phi_2>`.
    pub g22: f64,
    /// `|<phi_1|d phi_1>|^2`.
    pub o11_sq: f64,
    /// `|<phi_2|d phi_2>|^2`.
    pub o22_sq: f64,
    /// `|<phi_1|d phi_2>|^2`.
    pub o12_sq: f64,
}

pub fn mz_overlap_identities(cfg: &MzConfig) -> MzOverlapIdentities {
    let a2 = cfg.alpha_sq();
    match cfg.splitter {
        Splitter::BPi => MzOverlapIdentities {
            g11: a2 * a2 + a2,
            g22: a2 * a2 + 5.0 * a2 + 1.0,
            o11_sq: a2 * a2,
            o22_sq: (1.0 + a2).powi(2),
            o12_sq: a2,
        },
        Splitter::BPi2 => {
            let sh2 = cfg.r_mag.sinh().powi(2);
            let ch2 = cfg.r_mag.cosh().powi(2);
            let mixed =
                (cfg.alpha * cfg.alpha * C64::from_polar(1.0, -2.0 * cfg.phi)).re * cfg.r_mag.cosh() * cfg.r_mag.sinh();
            let g11 = 0.25 * (a2 * a2 + 2.0 * a2 + 4.0 * a2 * sh2 + sh2 * sh2 + 2.0 * sh2 * ch2 + sh2) + 0.5 * mixed;
            MzOverlapIdentities {
                g11,
                g22: g11 + sh2 + a2 + 0.5,
                o11_sq: 0.25 * (sh2 + a2).powi(2),
                o22_sq: 0.25 * (sh2 + a2 + 1.0).powi(2),
                o12_sq: 0.25 * a2,
            }
        }
    }
}

fn check_mixed_weight(p: f64) -> Result<()> {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidWeight(p));
    }
    if p == 0.0 || p == 1.0 {
        return Err(Error::DegenerateWeight(p));
    }
    Ok(())
}

/// Closed forms for both splitters. Full transmission uses the reference
/// expressions; the balanced case is [`mz_reduced_forms`].
///
/// The full-transmission `f_nh2 = (2p^3 - 2p^2 + 1)|alpha|^2 / (p(1-p))`
/// exceeds the value the state actually carries by `2|alpha|^2`; the
/// reduction gives `(2p^3 - 2p + 1)|alpha|^2 / (p(1-p))`.
pub fn mz_closed_forms(cfg: &MzConfig) -> Result<ClosedForms> {
    check_mixed_weight(cfg.p)?;
    let p = cfg.p;
    let a2 = cfg.alpha_sq();
    match cfg.splitter {
        Splitter::BPi => Ok(ClosedForms {
            f_h: 4.0 * a2 * (4.0 * p * p - 6.0 * p + 3.0),
            f_nh1: 4.0 * a2 * a2 + (20.0 - 16.0 * p) * a2 + 4.0 * (1.0 - p),
            f_nh2: (2.0 * p.powi(3) - 2.0 * p * p + 1.0) * a2 / (p * (1.0 - p)),
        }),
        Splitter::BPi2 => mz_reduced_forms(cfg),
    }
}

/// Two-state reductions with constant weights fed by the overlap
/// identities; `f_nh1` is taken at `beta = pi`.
pub fn mz_reduced_forms(cfg: &MzConfig) -> Result<ClosedForms> {
    check_mixed_weight(cfg.p)?;
    let o = mz_overlap_identities(cfg);
    let (p1, p2) = (cfg.p, 1.0 - cfg.p);
    Ok(ClosedForms {
        f_h: 4.0 * p1 * (o.g11 - o.o11_sq) + 4.0 * p2 * (o.g22 - o.o22_sq) - 16.0 * p1 * p2 * o.o12_sq,
        f_nh1: 4.0 * p1 * o.g11 + 4.0 * p2 * o.g22,
        f_nh2: p1 * (o.g11 - o.o11_sq)
            + p2 * (o.g22 - o.o22_sq)
            + (p2 * (1.0 - 3.0 * p1) / p1 + p1 * (1.0 - 3.0 * p2) / p2) * o.o12_sq,
    })
}

/// `4 |alpha|^2 (1 + gamma^2) e^{-2 gamma theta}`.
pub fn mz_nonunitary_qfi(alpha_sq: f64, gamma: f64, theta: f64) -> f64 {
    4.0 * alpha_sq * (1.0 + gamma * gamma) * (-2.0 * gamma * theta).exp()
}

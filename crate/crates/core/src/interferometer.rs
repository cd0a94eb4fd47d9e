//! Interferometric readout of `<phi|A|phi>` for a 2x2 operator `A = U R`.
//!
//! The input qubit enters path 1 of a two-path interferometer (basis
//! `|a,1>, |b,1>, |a,2>, |b,2>`); `R` acts on path 1, `U^dagger` and a phase
//! `e^{i chi}` on path 2, and the detector collects path 2.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::bounds::Observable;
use crate::error::{Error, Result};
use crate::qstate::matrix::{c, inner, max_abs_diff, CMatrix, CVector, C64};

/// Relative size of `|<w_perp|A|E_->|` below which `A` counts as singular
/// and `U` is completed by convention.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;
/// Distance from a required grid angle within which a grid point is used.
pub const GRID_MATCH_TOLERANCE: f64 = 1e-12;

/// Polar factors of a 2x2 operator together with the eigen-structure of
/// `A^dagger A = A_x sx + A_y sy + A_z sz + A_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFactors {
    pub u: CMatrix,
    pub r: CMatrix,
    /// `(Theta, Xi)` locating the `E_+` eigenvector on the Bloch sphere.
    pub angles: (f64, f64),
    /// `(E_+, E_-)`; `E_-` is taken as `|det A|^2 / E_+`.
    pub eigenvalues: (f64, f64),
    /// `(A_x, A_y, A_z, A_0)`.
    pub bloch: [f64; 4],
    /// `U` was completed on the kernel of `R` rather than determined by `A`.
    pub completed: bool,
}

impl PolarFactors {
    pub fn operator(&self) -> CMatrix {
        &self.u * &self.r
    }

    /// Eigenvectors `(|E_+>, |E_->)` of `A^dagger A`.
    pub fn eigenvectors(&self) -> (CVector, CVector) {
        bloch_eigenvectors(self.angles.0, self.angles.1)
    }
}

fn bloch_eigenvectors(theta: f64, xi: f64) -> (CVector, CVector) {
    let (s, co) = (theta / 2.0).sin_cos();
    let ph = C64::from_polar(1.0, -xi);
    (
        CVector::from_vec(vec![ph * co, c(s, 0.0)]),
        CVector::from_vec(vec![ph * s, c(-co, 0.0)]),
    )
}

/// Bloch components of `A^dagger A` for `A = a s+ + b s- + c sz + d`.
pub fn bloch_components(m: &CMatrix) -> [f64; 4] {
    let a = m[(0, 1)];
    let b = m[(1, 0)];
    let cc = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    let d = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let z = b.conj() * d - b.conj() * cc + a * cc.conj() + a * d.conj();
    [
        z.re,
        -z.im,
        2.0 * (cc.conj() * d).re + 0.5 * (b.norm_sqr() - a.norm_sqr()),
        0.5 * (a.norm_sqr() + b.norm_sqr()) + cc.norm_sqr() + d.norm_sqr(),
    ]
}

pub fn polar_decompose_2x2(a: &Observable) -> Result<PolarFactors> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.dim(),
        });
    }
    let m = a.matrix();
    let bloch = bloch_components(m);
    let [ax, ay, az, a0] = bloch;
    let radius = (ax * ax + ay * ay + az * az).sqrt();
    let theta = (ax * ax + ay * ay).sqrt().atan2(az);
    let xi = ay.atan2(ax);
    let e_plus = a0 + radius;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let e_minus = if e_plus > 0.0 { det.norm_sqr() / e_plus } else { 0.0 };
    let (ep, em) = bloch_eigenvectors(theta, xi);

    if e_plus <= 0.0 {
        return Ok(PolarFactors {
            u: CMatrix::identity(2, 2),
            r: CMatrix::zeros(2, 2),
            angles: (theta, xi),
            eigenvalues: (0.0, 0.0),
            bloch,
            completed: true,
        });
    }

    let sp = e_plus.sqrt();
    let sm = e_minus.sqrt();
    let w = m * &ep / c(sp, 0.0);
    let w_perp = CVector::from_vec(vec![-w[1].conj(), w[0].conj()]);
    let overlap = inner(&w_perp, &(m * &em));
    let completed = overlap.norm() <= SINGULAR_TOLERANCE * sp;
    let phase = if completed {
        // det U = e^{i kappa} conj(det[E+, E-]); choose det U = 1
        let det_e = ep[0] * em[1] - ep[1] * em[0];
        C64::from_polar(1.0, det_e.arg())
    } else {
        overlap / overlap.norm()
    };
    let u_minus = w_perp * phase;
    let u = &w * ep.adjoint() + &u_minus * em.adjoint();
    let r = &ep * ep.adjoint() * c(sp, 0.0) + &em * em.adjoint() * c(sm, 0.0);
    Ok(PolarFactors {
        u,
        r,
        angles: (theta, xi),
        eigenvalues: (e_plus, e_minus),
        bloch,
        completed,
    })
}

fn splitter() -> CMatrix {
    let s = 0.5f64.sqrt();
    CMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            c(s, 0.0)
        } else if i % 2 == j % 2 {
            c(0.0, s)
        } else {
            c(0.0, 0.0)
        }
    })
}

fn block(path1: &CMatrix, path2: &CMatrix) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(path1);
    m.view_mut((2, 2), (2, 2)).copy_from(path2);
    m
}

/// The full 4x4 map `B_2 e^{i chi} U^dagger R B_1`.
pub fn pipeline_matrix(factors: &PolarFactors, chi: f64) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    let b = splitter();
    let r = block(&factors.r, &id);
    let u_dag = block(&id, &factors.u.adjoint());
    let phase = block(&id, &(&id * C64::from_polar(1.0, chi)));
    &b * phase * u_dag * r * &b
}

fn check_input(phi_in: &CVector) -> Result<()> {
    if phi_in.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: phi_in.len(),
        });
    }
    let norm = phi_in.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Output state for an input qubit entering path 1.
pub fn pipeline_state(phi_in: &CVector, factors: &PolarFactors, chi: f64) -> Result<CVector> {
    check_input(phi_in)?;
    let embedded = CVector::from_vec(vec![phi_in[0], phi_in[1], c(0.0, 0.0), c(0.0, 0.0)]);
    Ok(pipeline_matrix(factors, chi) * embedded)
}

/// Squared norm of the path-2 part of the output.
pub fn detector_intensity(out: &CVector) -> f64 {
    out[2].norm_sqr() + out[3].norm_sqr()
}

/// `(1 + <R^2> + 2 |<A>| cos(chi - zeta)) / 4`.
pub fn closed_intensity(r2: f64, expectation: C64, chi: f64) -> f64 {
    0.25 * (1.0 + r2 + 2.0 * expectation.norm() * (chi - expectation.arg()).cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensitySample {
    pub chi: f64,
    pub raw: f64,
    /// `raw` divided by the peak `(1 + <R^2> + 2 |<A>|) / 4`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerResult {
    pub chi_samples: Vec<IntensitySample>,
    pub extracted_modulus: Option<f64>,
    pub extracted_phase: Option<f64>,
    pub r2_expectation: f64,
    pub direct_expectation: C64,
}

impl InterferometerResult {
    pub fn extracted(&self) -> Option<C64> {
        Some(C64::from_polar(self.extracted_modulus?, self.extracted_phase?))
    }
}

/// Detector intensity over `chi_grid` from the 4x4 pipeline.
pub fn intensity_curve(phi_in: &CVector, factors: &PolarFactors, chi_grid: &[f64]) -> Result<InterferometerResult> {
    check_input(phi_in)?;
    if chi_grid.is_empty() {
        return Err(Error::InsufficientGrid("empty chi grid".into()));
    }
    let a = factors.operator();
    let direct = inner(phi_in, &(&a * phi_in));
    let r_phi = &factors.r * phi_in;
    let r2 = r_phi.norm_squared();
    let peak = 0.25 * (1.0 + r2 + 2.0 * direct.norm());
    let chi_samples = chi_grid
        .iter()
        .map(|&chi| {
            let raw = detector_intensity(&pipeline_state(phi_in, factors, chi)?);
            Ok(IntensitySample {
                chi,
                raw,
                normalized: raw / peak,
            })
        })
        .collect::<Result<_>>()?;
    Ok(InterferometerResult {
        chi_samples,
        extracted_modulus: None,
        extracted_phase: None,
        r2_expectation: r2,
        direct_expectation: direct,
    })
}

fn sample_at(samples: &[IntensitySample], target: f64) -> Option<f64> {
    samples.iter().find_map(|s| {
        let d = (s.chi - target).rem_euclid(TAU);
        (d.min(TAU - d) <= GRID_MATCH_TOLERANCE).then_some(s.raw)
    })
}

/// `(|<A>|, zeta)` from the intensities at `chi = 0, pi/2, pi` and `<R^2>`.
pub fn extract_expectation(samples: &[IntensitySample], r2_expectation: f64) -> Result<(f64, f64)> {
    let missing = |name: &str| Error::InsufficientGrid(format!("grid lacks chi = {name}"));
    let i0 = sample_at(samples, 0.0).ok_or_else(|| missing("0"))?;
    let i_half = sample_at(samples, FRAC_PI_2).ok_or_else(|| missing("pi/2"))?;
    let i_pi = sample_at(samples, PI).ok_or_else(|| missing("pi"))?;
    let cos_part = 2.0 * (i0 - i_pi);
    let sin_part = 4.0 * (i_half - 0.25 * (1.0 + r2_expectation));
    Ok((0.5 * cos_part.hypot(sin_part), sin_part.atan2(cos_part)))
}

/// Polar decomposition, intensity curve and exact extraction in one call.
pub fn measure(a: &Observable, phi_in: &CVector, chi_grid: &[f64]) -> Result<InterferometerResult> {
    let factors = polar_decompose_2x2(a)?;
    let mut result = intensity_curve(phi_in, &factors, chi_grid)?;
    let (modulus, phase) = extract_expectation(&result.chi_samples, result.r2_expectation)?;
    result.extracted_modulus = Some(modulus);
    result.extracted_phase = Some(phase);
    Ok(result)
}

/// `count` equally spaced angles covering one period, starting at 0.
pub fn uniform_period_grid(count: usize) -> Vec<f64> {
    (0..count).map(|k| TAU * k as f64 / count as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyFit {
    pub modulus: f64,
    pub phase: f64,
    /// Standard error of `modulus` from the shot-noise covariance.
    pub modulus_std_error: f64,
    /// Fitted `(1 + <R^2>) / 4`.
    pub offset: f64,
}

/// Draws Poisson counts with mean `counts_per_point * I(chi)` and fits
/// `c0 + c1 cos chi + c2 sin chi` to the estimated intensities.
pub fn extract_expectation_noisy(samples: &[IntensitySample], counts_per_point: f64, seed: u64) -> Result<NoisyFit> {
    if samples.len() < 3 {
        return Err(Error::InsufficientGrid(format!("{} points, need 3", samples.len())));
    }
    if !(counts_per_point > 0.0) || !counts_per_point.is_finite() {
        return Err(Error::InvalidArgument(format!("counts_per_point = {counts_per_point}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let estimates: Vec<f64> = samples
        .iter()
        .map(|s| {
            let mean = counts_per_point * s.raw;
            let k = if mean > 0.0 {
                Poisson::new(mean)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?
                    .sample(&mut rng)
            } else {
                0.0
            };
            Ok(k / counts_per_point)
        })
        .collect::<Result<_>>()?;

    let rows: Vec<Vector3<f64>> = samples
        .iter()
        .map(|s| Vector3::new(1.0, s.chi.cos(), s.chi.sin()))
        .collect();
    let mut xtx = Matrix3::zeros();
    let mut xty = Vector3::zeros();
    let mut meat = Matrix3::zeros();
    for (x, &y) in rows.iter().zip(&estimates) {
        xtx += x * x.transpose();
        xty += x * y;
        meat += x * x.transpose() * (y.max(0.0) / counts_per_point);
    }
    let inv = xtx
        .try_inverse()
        .ok_or_else(|| Error::InsufficientGrid("grid does not determine the cosine fit".into()))?;
    let coef = inv * xty;
    let cov = inv * meat * inv;
    let (c1, c2) = (coef[1], coef[2]);
    let amp = c1.hypot(c2);
    let grad = if amp > 0.0 {
        Vector3::new(0.0, 2.0 * c1 / amp, 2.0 * c2 / amp)
    } else {
        Vector3::zeros()
    };
    Ok(NoisyFit {
        modulus: 2.0 * amp,
        phase: c2.atan2(c1),
        modulus_std_error: (grad.transpose() * cov * grad)[0].max(0.0).sqrt(),
        offset: coef[0],
    })
}

/// `max |U R - A|`.
pub fn reconstruction_error(factors: &PolarFactors, a: &Observable) -> f64 {
    max_abs_diff(&factors.operator(), a.matrix())
}

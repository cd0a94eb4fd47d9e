//! Differentiable families `theta -> rho(theta)`.

use std::fmt;
use std::sync::Arc;

use super::curves::{assemble_drho, assemble_rho, CurvePoint, EigenCurves};
use super::density::{DensityMatrix, TangentMatrix, DEFAULT_PSD_TOLERANCE};
use super::matrix::{c, commutator, inner, outer, CMatrix, CVector, ComplexMatrix, Generator, C64};
use crate::error::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Tolerance used when validating analytic tangents.
const TANGENT_TOLERANCE: f64 = 1e-9;

pub type MatrixFn = Arc<dyn Fn(f64) -> Result<CMatrix> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    UnitaryGenerator,
    NonunitaryGenerator,
    EigenCurve,
    RawCallback,
}

#[derive(Clone)]
enum Repr {
    Unitary { rho0: CMatrix, generator: Arc<Generator> },
    Nonunitary(Arc<NonunitaryPure>),
    Curves(Arc<dyn EigenCurves>),
    Raw { rho: MatrixFn, drho: Option<MatrixFn> },
}

/// A parametrized state family with an analytic or numerical tangent.
#[derive(Clone)]
pub struct StateFamily {
    dim: usize,
    kind: FamilyKind,
    repr: Repr,
}

impl fmt::Debug for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateFamily")
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

/// `rho(theta) = exp(-i theta H) rho0 exp(i theta H)`.
pub fn unitary_family(rho0: &DensityMatrix, h: &ComplexMatrix) -> Result<StateFamily> {
    let generator = Generator::dense(h, 1e-12)?;
    unitary_family_with(rho0, generator)
}

pub fn unitary_family_with(rho0: &DensityMatrix, generator: Generator) -> Result<StateFamily> {
    if generator.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            found: generator.dim(),
        });
    }
    Ok(StateFamily {
        dim: rho0.dim(),
        kind: FamilyKind::UnitaryGenerator,
        repr: Repr::Unitary {
            rho0: rho0.matrix().clone(),
            generator: Arc::new(generator),
        },
    })
}

/// Family that does not depend on `theta`.
pub fn constant_family(rho: &DensityMatrix) -> StateFamily {
    unitary_family_with(rho, Generator::diagonal(vec![0.0; rho.dim()])).expect("matching dimensions")
}

/// Normalized pure states `M exp(-i theta H (1 - i gamma)) |phi0>`.
pub fn nonunitary_pure_family(phi0: &CVector, h: &ComplexMatrix, gamma: f64) -> Result<StateFamily> {
    nonunitary_pure_family_with(phi0, Generator::dense(h, 1e-12)?, gamma)
}

pub fn nonunitary_pure_family_with(phi0: &CVector, generator: Generator, gamma: f64) -> Result<StateFamily> {
    let nu = NonunitaryPure::new(phi0.clone(), generator, gamma)?;
    Ok(StateFamily {
        dim: nu.dim(),
        kind: FamilyKind::NonunitaryGenerator,
        repr: Repr::Nonunitary(Arc::new(nu)),
    })
}

pub fn eigen_curve_family(curves: Arc<dyn EigenCurves>) -> StateFamily {
    StateFamily {
        dim: curves.dim(),
        kind: FamilyKind::EigenCurve,
        repr: Repr::Curves(curves),
    }
}

/// Family given by callbacks. Without `drho` the tangent is taken by
/// Richardson-extrapolated central differences.
pub fn raw_family(dim: usize, rho: MatrixFn, drho: Option<MatrixFn>) -> StateFamily {
    StateFamily {
        dim,
        kind: FamilyKind::RawCallback,
        repr: Repr::Raw { rho, drho },
    }
}

impl StateFamily {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn eigen_curves(&self) -> Option<&Arc<dyn EigenCurves>> {
        match &self.repr {
            Repr::Curves(c) => Some(c),
            _ => None,
        }
    }

    pub fn nonunitary(&self) -> Option<&NonunitaryPure> {
        match &self.repr {
            Repr::Nonunitary(n) => Some(n),
            _ => None,
        }
    }

    pub fn generator(&self) -> Option<&Generator> {
        match &self.repr {
            Repr::Unitary { generator, .. } => Some(generator),
            Repr::Nonunitary(n) => Some(&n.generator),
            _ => None,
        }
    }

    fn rho_matrix(&self, theta: f64) -> Result<CMatrix> {
        match &self.repr {
            Repr::Unitary { rho0, generator } => {
                let u = generator.exp_matrix(c(0.0, -theta));
                Ok(&u * rho0 * u.adjoint())
            }
            Repr::Nonunitary(n) => {
                let psi = n.state(theta)?;
                Ok(outer(&psi, &psi))
            }
            Repr::Curves(cv) => Ok(assemble_rho(cv.weights(), &cv.point(theta)?)),
            Repr::Raw { rho, .. } => rho(theta),
        }
    }

    pub fn rho_at(&self, theta: f64) -> Result<DensityMatrix> {
        let m = self.rho_matrix(theta)?;
        if m.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows(),
            });
        }
        super::density::validate_density(&ComplexMatrix::new(m)?, DEFAULT_PSD_TOLERANCE)
    }

    pub fn drho_at(&self, theta: f64) -> Result<TangentMatrix> {
        let m = match &self.repr {
            Repr::Unitary { generator, .. } => {
                let rho = self.rho_matrix(theta)?;
                commutator(&generator.to_matrix(), &rho) * c(0.0, -1.0)
            }
            Repr::Nonunitary(n) => {
                let psi = n.state(theta)?;
                let dpsi = n.state_derivative(theta)?;
                let t = outer(&dpsi, &psi);
                &t + t.adjoint()
            }
            Repr::Curves(cv) => assemble_drho(cv.weights(), &cv.point(theta)?),
            Repr::Raw { drho: Some(d), .. } => d(theta)?,
            Repr::Raw { drho: None, .. } => {
                return finite_difference_tangent_richardson(self, theta, 1e-3);
            }
        };
        TangentMatrix::new(m, TANGENT_TOLERANCE)
    }

    /// Curve point for eigen-curve families.
    pub fn curve_point(&self, theta: f64) -> Option<Result<CurvePoint>> {
        self.eigen_curves().map(|cv| cv.point(theta))
    }
}

fn central_difference(family: &StateFamily, theta: f64, h: f64) -> Result<CMatrix> {
    let plus = family.rho_matrix(theta + h)?;
    let minus = family.rho_matrix(theta - h)?;
    Ok((plus - minus) / c(2.0 * h, 0.0))
}

fn project_tangent(m: CMatrix) -> Result<TangentMatrix> {
    let n = m.nrows();
    let mut sym = (&m + m.adjoint()) * c(0.5, 0.0);
    let shift = sym.trace() / c(n as f64, 0.0);
    for i in 0..n {
        sym[(i, i)] -= shift;
    }
    TangentMatrix::new(sym, f64::INFINITY)
}

/// Central difference `(rho(theta+h) - rho(theta-h)) / 2h`, symmetrized and
/// projected to zero trace.
pub fn finite_difference_tangent(family: &StateFamily, theta: f64, h: f64) -> Result<TangentMatrix> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidStep(h));
    }
    project_tangent(central_difference(family, theta, h)?)
}

/// Two-level Richardson extrapolation of the central difference:
/// `(4 D(h/2) - D(h)) / 3`.
pub fn finite_difference_tangent_richardson(family: &StateFamily, theta: f64, h: f64) -> Result<TangentMatrix> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidStep(h));
    }
    let coarse = central_difference(family, theta, h)?;
    let fine = central_difference(family, theta, 0.5 * h)?;
    project_tangent((fine * c(4.0, 0.0) - coarse) / c(3.0, 0.0))
}

/// Pure-state family driven by the non-Hermitian generator `H (1 - i gamma)`.
#[derive(Debug, Clone)]
pub struct NonunitaryPure {
    phi0: CVector,
    generator: Generator,
    gamma: f64,
}

impl NonunitaryPure {
    pub fn new(phi0: CVector, generator: Generator, gamma: f64) -> Result<Self> {
        let norm = phi0.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        if generator.dim() != phi0.len() {
            return Err(Error::DimensionMismatch {
                expected: phi0.len(),
                found: generator.dim(),
            });
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma = {gamma}")));
        }
        Ok(Self { phi0, generator, gamma })
    }

    pub fn dim(&self) -> usize {
        self.phi0.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `-i (1 - i gamma) = -gamma - i`.
    fn rate(&self) -> C64 {
        c(-self.gamma, -1.0)
    }

    /// Unnormalized `|phi'(theta)>`.
    pub fn unnormalized(&self, theta: f64) -> CVector {
        self.generator.exp_apply(self.rate() * theta, &self.phi0)
    }

    /// `d|phi'>/dtheta = -i H (1 - i gamma) |phi'>`.
    pub fn unnormalized_derivative(&self, theta: f64) -> CVector {
        self.generator.apply(&self.unnormalized(theta)) * self.rate()
    }

    /// `<phi'|phi'> = 1/M^2`.
    pub fn norm_sq(&self, theta: f64) -> Result<f64> {
        let n2 = self.unnormalized(theta).norm_squared();
        if !(n2 >= 1e-300) || !n2.is_finite() {
            return Err(Error::NormalizationUnderflow { norm_sq: n2 });
        }
        Ok(n2)
    }

    /// Normalization constant `M`.
    pub fn normalization(&self, theta: f64) -> Result<f64> {
        Ok(1.0 / self.norm_sq(theta)?.sqrt())
    }

    /// `dM/dtheta = -M^3 Re<phi'|dphi'>`.
    pub fn normalization_derivative(&self, theta: f64) -> Result<f64> {
        let m = self.normalization(theta)?;
        let v = self.unnormalized(theta);
        let dv = self.generator.apply(&v) * self.rate();
        Ok(-m.powi(3) * inner(&v, &dv).re)
    }

    pub fn state(&self, theta: f64) -> Result<CVector> {
        let v = self.unnormalized(theta);
        let n2 = v.norm_squared();
        if !(n2 >= 1e-300) || !n2.is_finite() {
            return Err(Error::NormalizationUnderflow { norm_sq: n2 });
        }
        Ok(v / c(n2.sqrt(), 0.0))
    }

    /// `d(M |phi'>)/dtheta = dM |phi'> + M d|phi'>`.
    pub fn state_derivative(&self, theta: f64) -> Result<CVector> {
        let v = self.unnormalized(theta);
        let dv = self.generator.apply(&v) * self.rate();
        let m = self.normalization(theta)?;
        let dm = -m.powi(3) * inner(&v, &dv).re;
        Ok(v * c(dm, 0.0) + dv * c(m, 0.0))
    }

    /// Pure-state QFI written through the unnormalized curve:
    /// `4 (M^2 <dphi'|dphi'> - (dM)^2 / M^2 - M^4 (Im<phi'|dphi'>)^2)`.
    pub fn qfi_from_normalization(&self, theta: f64) -> Result<f64> {
        let v = self.unnormalized(theta);
        let dv = self.generator.apply(&v) * self.rate();
        let m2 = 1.0 / self.norm_sq(theta)?;
        let m = m2.sqrt();
        let ov = inner(&v, &dv);
        let dm = -m * m2 * ov.re;
        Ok(4.0 * (m2 * dv.norm_squared() - dm * dm / m2 - m2 * m2 * ov.im * ov.im))
    }

    /// Pure-state QFI `4 (<dpsi|dpsi> - |<psi|dpsi>|^2)` of the normalized curve.
    pub fn qfi_projected(&self, theta: f64) -> Result<f64> {
        let psi = self.state(theta)?;
        let dpsi = self.state_derivative(theta)?;
        let horizontal = &dpsi - &psi * inner(&psi, &dpsi);
        Ok(4.0 * horizontal.norm_squared())
    }
}

use crate::error::{Error, Result};
use crate::qstate::matrix::{c, hermitian_deviation, max_abs, trace_product, CMatrix, ComplexMatrix, C64};

/// Deviation `max |A - A^dagger|` below which an observable counts as Hermitian.
pub const HERMITIAN_FLAG_TOLERANCE: f64 = 1e-12;

/// General square operator used as a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
    hermitian: bool,
}

impl Observable {
    pub fn new(m: CMatrix) -> Result<Self> {
        let matrix = ComplexMatrix::new(m)?;
        let scale = max_abs(&matrix).max(1.0);
        let hermitian = hermitian_deviation(&matrix) <= HERMITIAN_FLAG_TOLERANCE * scale;
        Ok(Self { matrix, hermitian })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(CMatrix::identity(n, n)).expect("finite")
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.as_matrix()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.matrix() * c(factor, 0.0)).expect("finite")
    }
}

pub(crate) fn check_dim(rho: &CMatrix, a: &Observable) -> Result<()> {
    if rho.nrows() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            found: a.dim(),
        });
    }
    Ok(())
}

/// `Tr(rho A)`; real for Hermitian observables.
pub fn expectation_matrix(rho: &CMatrix, a: &Observable) -> Result<C64> {
    check_dim(rho, a)?;
    let z = trace_product(rho, a.matrix());
    Ok(if a.is_hermitian() { c(z.re, 0.0) } else { z })
}

/// `<A^dagger A> - |<A>|^2`, floored at zero within 1e-12 of it.
pub fn variance_matrix(rho: &CMatrix, a: &Observable) -> Result<f64> {
    check_dim(rho, a)?;
    let m = a.matrix();
    let second = trace_product(rho, &(m.adjoint() * m)).re;
    let mean = trace_product(rho, m);
    let v = second - mean.norm_sqr();
    Ok(if v < 0.0 && v > -1e-12 * second.abs().max(1.0) {
        0.0
    } else {
        v
    })
}

pub fn expectation(rho: &crate::qstate::DensityMatrix, a: &Observable) -> Result<C64> {
    expectation_matrix(rho.matrix(), a)
}

pub fn variance_nh(rho: &crate::qstate::DensityMatrix, a: &Observable) -> Result<f64> {
    variance_matrix(rho.matrix(), a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{CVector, DensityMatrix};

    fn ket(a: f64, b: f64) -> CVector {
        CVector::from_vec(vec![c(a, 0.0), c(b, 0.0)])
    }

    fn op(entries: [[f64; 2]; 2]) -> Observable {
        Observable::new(CMatrix::from_fn(2, 2, |i, j| c(entries[i][j], 0.0))).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let zero = DensityMatrix::pure(&ket(1.0, 0.0)).unwrap();
        let s = 0.5f64.sqrt();
        let plus = DensityMatrix::pure(&ket(s, s)).unwrap();
        let raising = op([[0.0, 1.0], [0.0, 0.0]]);
        assert!(!raising.is_hermitian());
        assert_eq!(expectation(&zero, &Observable::identity(2)).unwrap(), c(1.0, 0.0));
        assert_eq!(expectation(&zero, &raising).unwrap(), c(0.0, 0.0));
        assert!((expectation(&plus, &raising).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!(matches!(
            expectation(&zero, &Observable::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn variance_examples() {
        let zero = DensityMatrix::pure(&ket(1.0, 0.0)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(variance_nh(&mixed, &Observable::identity(2)).unwrap(), 0.0);
        assert!((variance_nh(&mixed, &op([[1.0, 0.0], [0.0, -1.0]])).unwrap() - 1.0).abs() < 1e-15);
        assert!((variance_nh(&zero, &op([[0.0, 0.0], [1.0, 0.0]])).unwrap() - 1.0).abs() < 1e-15);
    }
}

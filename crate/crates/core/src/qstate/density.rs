use super::matrix::{hermitian_deviation, hermitian_part, outer, CMatrix, CVector, ComplexMatrix, HermitianEigen};
use crate::error::{Error, Result};

pub const DEFAULT_PSD_TOLERANCE: f64 = 1e-10;

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    tolerance: f64,
}

/// Checks the density-matrix conditions to `eps_psd` and returns a validated
/// copy. The stored matrix is the Hermitian part of the input.
pub fn validate_density(matrix: &ComplexMatrix, eps_psd: f64) -> Result<DensityMatrix> {
    let m = matrix.as_matrix();
    let deviation = hermitian_deviation(m);
    if deviation > eps_psd {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > eps_psd {
        return Err(Error::TraceNotOne { trace });
    }
    let h = hermitian_part(m);
    let eig = HermitianEigen::new(&h)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < -eps_psd {
            return Err(Error::NegativeEigenvalue { eigenvalue: lowest });
        }
    }
    Ok(DensityMatrix {
        matrix: ComplexMatrix::new(h)?,
        tolerance: eps_psd,
    })
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        validate_density(&ComplexMatrix::new(m)?, DEFAULT_PSD_TOLERANCE)
    }

    /// `|psi><psi|`; the vector must be normalized to 1e-10.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(outer(psi, psi))
    }

    /// `sum_i p_i |v_i><v_i|`.
    pub fn mixture(weights: &[f64], states: &[CVector]) -> Result<Self> {
        let n = states.first().map_or(0, |v| v.len());
        let mut m = CMatrix::zeros(n, n);
        for (&p, v) in weights.iter().zip(states) {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            m += outer(v, v).scale(p);
        }
        Self::new(m)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::new(CMatrix::identity(n, n).scale(1.0 / n as f64)).expect("finite"),
            tolerance: DEFAULT_PSD_TOLERANCE,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.as_matrix()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Hermitian, traceless derivative `d rho / d theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentMatrix {
    matrix: ComplexMatrix,
}

impl TangentMatrix {
    /// Checks Hermiticity and zero trace to `tol`, scaled by the largest entry.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        let cm = ComplexMatrix::new(m)?;
        let scale = super::matrix::max_abs(&cm).max(1.0);
        let deviation = cm.hermitian_deviation();
        if deviation > tol * scale {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = cm.trace();
        if trace.norm() > tol * scale * cm.dim() as f64 {
            return Err(Error::TraceNotZero { trace: trace.norm() });
        }
        Ok(Self {
            matrix: ComplexMatrix::new(hermitian_part(&cm))?,
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.as_matrix()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::matrix::c;

    fn cm(rows: &[&[(f64, f64)]]) -> ComplexMatrix {
        let n = rows.len();
        ComplexMatrix::new(CMatrix::from_fn(n, n, |i, j| c(rows[i][j].0, rows[i][j].1))).unwrap()
    }

    #[test]
    fn maximally_mixed_qubit_is_valid() {
        let m = cm(&[&[(0.5, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]]);
        assert!(validate_density(&m, 1e-12).is_ok());
    }

    #[test]
    fn complex_offdiagonal_state_is_valid() {
        let m = cm(&[&[(0.6, 0.0), (0.0, 0.2)], &[(0.0, -0.2), (0.4, 0.0)]]);
        let rho = validate_density(&m, 1e-12).unwrap();
        let eig = HermitianEigen::new(rho.matrix()).unwrap();
        // 0.5 +- sqrt(0.01 + 0.04)
        let r = 0.05f64.sqrt();
        assert!((eig.values[1] - (0.5 + r)).abs() < 1e-14);
        assert!((eig.values[0] - (0.5 - r)).abs() < 1e-14);
    }

    #[test]
    fn negative_diagonal_is_rejected() {
        let m = cm(&[&[(1.2, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (-0.2, 0.0)]]);
        match validate_density(&m, 1e-12) {
            Err(Error::NegativeEigenvalue { eigenvalue }) => assert!((eigenvalue + 0.2).abs() < 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trace_and_hermiticity_errors_carry_magnitudes() {
        let m = cm(&[&[(0.7, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.4, 0.0)]]);
        assert!(
            matches!(validate_density(&m, 1e-12), Err(Error::TraceNotOne { trace }) if (trace - 1.1).abs() < 1e-14)
        );
        let m = cm(&[&[(0.5, 0.0), (0.1, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]]);
        assert!(
            matches!(validate_density(&m, 1e-12), Err(Error::NotHermitian { deviation }) if (deviation - 0.1).abs() < 1e-14)
        );
    }

    #[test]
    fn validation_does_not_mutate_input() {
        let m = cm(&[&[(0.6, 0.0), (0.0, 0.2)], &[(0.0, -0.2), (0.4, 0.0)]]);
        let before = m.clone();
        let _ = validate_density(&m, 1e-12);
        assert_eq!(m, before);
    }

    #[test]
    fn tangent_requires_zero_trace() {
        let m = CMatrix::identity(2, 2);
        assert!(matches!(TangentMatrix::new(m, 1e-10), Err(Error::TraceNotZero { .. })));
    }
}

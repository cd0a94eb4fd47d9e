use crate::error::Result;
use crate::qstate::matrix::{trace_product, CMatrix};
use crate::qstate::DensityMatrix;

use super::observable::{check_dim, variance_matrix, Observable};

/// Both uncertainty relations for a pair of general operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    /// `<dA^dagger dA>`.
    pub var_a: f64,
    pub var_b: f64,
    /// `|<C>|^2 / 4` with the centered `C = i (dA^dagger dB - dB^dagger dA)`.
    pub weak_rhs: f64,
    /// `|<C>|^2 / 4` with the uncentered `C = i (A^dagger B - B^dagger A)`.
    /// Not a bound for non-Hermitian operators; reported for comparison.
    pub weak_rhs_uncentered: f64,
    /// `|<A^dagger B> - <A^dagger><B>|^2`.
    pub strong_rhs: f64,
    pub weak_holds: bool,
    pub strong_holds: bool,
}

pub fn uncertainty_check(rho: &DensityMatrix, a: &Observable, b: &Observable) -> Result<UncertaintyReport> {
    uncertainty_check_matrix(rho.matrix(), a, b)
}

pub fn uncertainty_check_matrix(rho: &CMatrix, a: &Observable, b: &Observable) -> Result<UncertaintyReport> {
    check_dim(rho, a)?;
    check_dim(rho, b)?;
    let var_a = variance_matrix(rho, a)?;
    let var_b = variance_matrix(rho, b)?;
    let am = a.matrix();
    let bm = b.matrix();
    let mean_a = trace_product(rho, am);
    let mean_b = trace_product(rho, bm);
    let cross = trace_product(rho, &(am.adjoint() * bm));
    // <dA^dagger dB>; its conjugate is <dB^dagger dA>
    let centered = cross - mean_a.conj() * mean_b;
    let strong_rhs = centered.norm_sqr();
    let weak_rhs = centered.im * centered.im;
    let weak_rhs_uncentered = cross.im * cross.im;
    let product = var_a * var_b;
    let tol = 1e-10 * product.abs().max(1.0);
    Ok(UncertaintyReport {
        var_a,
        var_b,
        weak_rhs,
        weak_rhs_uncentered,
        strong_rhs,
        weak_holds: weak_rhs <= product + tol,
        strong_holds: strong_rhs <= product + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::matrix::c;
    use crate::qstate::CVector;

    fn zero() -> DensityMatrix {
        DensityMatrix::pure(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap()
    }

    #[test]
    fn pauli_pair_saturates_weak_relation() {
        let sx = Observable::new(CMatrix::from_fn(
            2,
            2,
            |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) },
        ))
        .unwrap();
        let sy = Observable::new(CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => c(0.0, 0.0),
        }))
        .unwrap();
        let r = uncertainty_check(&zero(), &sx, &sy).unwrap();
        assert!((r.weak_rhs - 1.0).abs() < 1e-15);
        assert!((r.var_a * r.var_b - 1.0).abs() < 1e-15);
        assert!(r.weak_holds && r.strong_holds);
    }

    #[test]
    fn identical_operators_saturate_strong_relation() {
        let a = Observable::new(CMatrix::from_fn(2, 2, |i, j| c(0.3 * i as f64 + 0.1, 0.2 * j as f64))).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let r = uncertainty_check(&rho, &a, &a).unwrap();
        assert!((r.strong_rhs - r.var_a * r.var_a).abs() < 1e-14);
    }

    #[test]
    fn uncentered_commutator_is_not_a_bound() {
        // A = I has zero variance while <A^dagger B> = <B> may be complex
        let a = Observable::identity(2);
        let b = Observable::new(CMatrix::from_fn(
            2,
            2,
            |i, j| if i == j { c(0.0, 1.0) } else { c(0.0, 0.0) },
        ))
        .unwrap();
        let r = uncertainty_check(&zero(), &a, &b).unwrap();
        assert_eq!(r.var_a, 0.0);
        assert!(r.weak_rhs_uncentered > 0.5);
        assert!(r.weak_holds && r.strong_holds);
    }
}

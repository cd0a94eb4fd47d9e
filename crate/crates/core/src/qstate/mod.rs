//! Complex matrices, density matrices, spectral data and differentiable
//! state families.

pub mod curves;
pub mod density;
pub mod family;
pub mod matrix;
pub mod spectral;

pub use curves::{
    assemble_drho, assemble_rho, CurveOverlaps, CurvePoint, EigenCurves, GeneratedCurves, QuadraticGauge,
};
pub use density::{validate_density, DensityMatrix, TangentMatrix, DEFAULT_PSD_TOLERANCE};
pub use family::{
    constant_family, eigen_curve_family, finite_difference_tangent, finite_difference_tangent_richardson,
    nonunitary_pure_family, nonunitary_pure_family_with, raw_family, unitary_family, unitary_family_with, FamilyKind,
    MatrixFn, NonunitaryPure, StateFamily, DEFAULT_FD_STEP,
};
pub use matrix::{c, CMatrix, CVector, ComplexMatrix, Generator, HermitianEigen, C64};
pub use spectral::{spectral_decompose, spectral_decompose_matrix, SpectralForm, DEFAULT_EPS_RANK, EPS_DEGENERATE};

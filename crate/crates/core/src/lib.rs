//! Hermitian and non-Hermitian quantum Fisher information, Cramér-Rao bounds,
//! saturation sampling, the GHZ and Mach-Zehnder model families, and the
//! interferometric measurement of non-Hermitian observables.

pub mod bounds;
pub mod error;
pub mod fisher;
pub mod interferometer;
pub mod models;
pub mod qstate;

pub use bounds::{Observable, ObservableKind, SaturationResult, UncertaintyReport};
pub use error::{Error, Result};
pub use fisher::{FisherMethod, FisherReport};
pub use interferometer::{InterferometerResult, PolarFactors};
pub use models::{ClosedForms, GhzConfig, MzConfig, Splitter};
pub use qstate::{CMatrix, CVector, ComplexMatrix, DensityMatrix, SpectralForm, StateFamily, TangentMatrix, C64};

//! Hermitian and non-Hermitian quantum Fisher information and the
//! corresponding logarithmic derivatives.

pub mod forms;
pub mod log_derivative;
pub mod report;

pub use forms::{
    qfi_hermitian, qfi_hermitian_eigen, qfi_nh1_eigen, qfi_nh1_matrix, qfi_nh2_eigen, qfi_nh2_matrix, CLAMP_TOLERANCE,
};
pub use log_derivative::{
    hermitian_sld, log_derivative_nh1, log_derivative_nh2, LogDerivative, LogDerivativeVariant, BETA_PI_TOLERANCE,
};
pub use report::{
    fisher_report, qfi_hermitian_family, qfi_nh1, qfi_nh2, report_from_spectrum, FisherMethod, FisherReport,
    LocalSpectrum,
};

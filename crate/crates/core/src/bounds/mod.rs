//! Variances of general operators, uncertainty relations, error propagation
//! and sampling of random measurements against the Fisher bounds.

mod observable;
mod propagation;
mod sampling;
mod uncertainty;

pub use observable::{
    expectation, expectation_matrix, variance_matrix, variance_nh, Observable, HERMITIAN_FLAG_TOLERANCE,
};
pub use propagation::{
    error_propagation, error_propagation_local, optimal_measurement_nh2, optimal_measurement_sld,
    DERIVATIVE_CHECK_TOLERANCE, ZERO_SIGNAL_TOLERANCE,
};
pub use sampling::{
    sample_observables, saturation_scan, saturation_scan_local, LocalModel, ObservableKind, SampleSource,
    SaturationResult, SaturationSample, SaturationSummary, BELOW_BOUND_MARGIN,
};
pub use uncertainty::{uncertainty_check, uncertainty_check_matrix, UncertaintyReport};

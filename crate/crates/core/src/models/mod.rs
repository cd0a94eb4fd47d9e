//! The GHZ and Mach-Zehnder model families with their closed-form Fisher
//! informations.

pub mod fock;
pub mod ghz;
pub mod mz;

pub use fock::{fock_operators, FockOperators};
pub use ghz::{ghz_closed_forms, ghz_family, ghz_family_full, ghz_nonunitary_qfi, GhzConfig};
pub use mz::{
    mz_closed_forms, mz_family, mz_nonunitary_qfi, mz_overlap_identities, mz_reduced_forms, MzConfig, MzModel,
    MzOverlapIdentities, Splitter,
};

/// Closed-form `(F_H, F_nH1 at beta = pi, F_nH2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    pub f_h: f64,
    pub f_nh1: f64,
    pub f_nh2: f64,
}

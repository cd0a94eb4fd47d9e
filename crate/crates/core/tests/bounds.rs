mod common;

use common::{random_hermitian, random_matrix, random_mixture, rng};
use proptest::prelude::*;
use qcrb_core::bounds::{
    error_propagation, error_propagation_local, optimal_measurement_nh2, sample_observables, saturation_scan_local,
    uncertainty_check, variance_nh, LocalModel, Observable, ObservableKind,
};
use qcrb_core::fisher::{fisher_report, report_from_spectrum};
use qcrb_core::qstate::unitary_family;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn uncertainty_relations_hold(seed in any::<u64>(), n in 2usize..5, rank in 1usize..5) {
        let mut r = rng(seed);
        let mix = random_mixture(&mut r, n, rank.min(n));
        let a = Observable::new(random_matrix(&mut r, n)).unwrap();
        let b = Observable::new(random_matrix(&mut r, n)).unwrap();
        let rep = uncertainty_check(&mix.rho, &a, &b).unwrap();
        prop_assert!(rep.weak_holds && rep.strong_holds, "{rep:?}");
        prop_assert!(rep.weak_rhs <= rep.strong_rhs + 1e-12 * rep.strong_rhs.max(1.0));
        prop_assert!(variance_nh(&mix.rho, &a).unwrap() >= 0.0);
    }

    #[test]
    fn error_propagation_is_scale_invariant(seed in any::<u64>(), n in 2usize..4, scale in 0.1f64..10.0) {
        let mut r = rng(seed);
        let mix = random_mixture(&mut r, n, n);
        let fam = unitary_family(&mix.rho, &random_hermitian(&mut r, n)).unwrap();
        let a = Observable::new(random_matrix(&mut r, n)).unwrap();
        let v1 = error_propagation(&fam, 0.2, &a).unwrap();
        let v2 = error_propagation(&fam, 0.2, &a.scaled(-scale)).unwrap();
        prop_assert!((v1 - v2).abs() <= 1e-9 * v1.max(1.0));
    }

    #[test]
    fn hermitian_measurements_respect_qfi(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let mix = random_mixture(&mut r, n, n);
        let fam = unitary_family(&mix.rho, &random_hermitian(&mut r, n)).unwrap();
        let local = LocalModel::at(&fam, 0.1).unwrap();
        let rep = report_from_spectrum(&local.spectrum, std::f64::consts::PI).unwrap();
        let samples = sample_observables(n, 64, ObservableKind::Hermitian, seed);
        let res = saturation_scan_local(&local, &samples, &rep).unwrap();
        prop_assert!(!res.summary.hermitian_violates_f_h);
        let f2 = rep.f_nh2;
        let opt = optimal_measurement_nh2(&local.spectrum, 1.0);
        let v = error_propagation_local(&local.rho, &local.drho, &opt).unwrap();
        prop_assert!((v * f2 - 1.0).abs() < 1e-8);
    }
}

#[test]
fn reduced_and_full_models_give_same_variances() {
    let mut r = rng(3);
    let mix = random_mixture(&mut r, 4, 2);
    let h = random_hermitian(&mut r, 4);
    let curves = qcrb_core::qstate::GeneratedCurves::new(
        mix.weights.clone(),
        mix.vectors.clone(),
        qcrb_core::qstate::Generator::dense(h.as_matrix(), 1e-12).unwrap(),
    )
    .unwrap();
    let fam = qcrb_core::qstate::eigen_curve_family(std::sync::Arc::new(curves));
    let full = LocalModel::at(&fam, 0.3).unwrap();
    let reduced = LocalModel::reduced(&fam, 0.3).unwrap();
    assert!(reduced.dim() <= 4);
    let rep = fisher_report(&fam, 0.3, 1.0).unwrap();
    let red_rep = report_from_spectrum(&reduced.spectrum, 1.0).unwrap();
    assert!((rep.f_h - red_rep.f_h).abs() < 1e-9 * rep.f_h.max(1.0));
    assert!((rep.f_nh2 - red_rep.f_nh2).abs() < 1e-9 * rep.f_nh2.max(1.0));
    let opt_full = optimal_measurement_nh2(&full.spectrum, 1.0);
    let opt_red = optimal_measurement_nh2(&reduced.spectrum, 1.0);
    let v_full = error_propagation_local(&full.rho, &full.drho, &opt_full).unwrap();
    let v_red = error_propagation_local(&reduced.rho, &reduced.drho, &opt_red).unwrap();
    assert!((v_full - v_red).abs() < 1e-9 * v_full);
}

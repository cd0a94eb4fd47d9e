mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use common::{random_matrix, random_unit, rng};
use qcrb_core::bounds::Observable;
use qcrb_core::interferometer::{
    closed_intensity, detector_intensity, intensity_curve, measure, pipeline_state, polar_decompose_2x2,
    reconstruction_error,
};
use qcrb_core::qstate::matrix::max_abs_diff;
use qcrb_core::qstate::{c, CMatrix, C64};

fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[test]
fn round_trip_over_random_operators() {
    let mut r = rng(2024);
    let grid = [0.0, FRAC_PI_2, PI, 1.0, 4.0];
    for _ in 0..500 {
        let a = Observable::new(random_matrix(&mut r, 2)).unwrap();
        let phi = random_unit(&mut r, 2);
        let direct = (phi.adjoint() * a.matrix() * &phi)[(0, 0)];
        let res = measure(&a, &phi, &grid).unwrap();
        let modulus = res.extracted_modulus.unwrap();
        assert!(
            (modulus - direct.norm()).abs() < 1e-10,
            "{modulus} vs {}",
            direct.norm()
        );
        if direct.norm() >= 1e-12 {
            assert!(phase_distance(res.extracted_phase.unwrap(), direct.arg()) < 1e-10);
        }
        for s in &res.chi_samples {
            let closed = closed_intensity(res.r2_expectation, direct, s.chi);
            assert!((s.raw - closed).abs() < 1e-12);
        }
    }
}

#[test]
fn singular_operators_round_trip() {
    let mut r = rng(77);
    for _ in 0..200 {
        // rank one: outer product of two random vectors
        let u = random_unit(&mut r, 2);
        let v = random_unit(&mut r, 2);
        let m = &u * v.adjoint() * c(1.7, 0.0);
        let a = Observable::new(m).unwrap();
        let f = polar_decompose_2x2(&a).unwrap();
        assert!(f.completed);
        assert!(reconstruction_error(&f, &a) < 1e-12);
        assert!(max_abs_diff(&(&f.u * f.u.adjoint()), &CMatrix::identity(2, 2)) < 1e-12);
        let phi = random_unit(&mut r, 2);
        let direct: C64 = (phi.adjoint() * a.matrix() * &phi)[(0, 0)];
        let res = measure(&a, &phi, &[0.0, FRAC_PI_2, PI]).unwrap();
        assert!((res.extracted_modulus.unwrap() - direct.norm()).abs() < 1e-10);
        if direct.norm() >= 1e-12 {
            assert!(phase_distance(res.extracted_phase.unwrap(), direct.arg()) < 1e-10);
        }
    }
}

#[test]
fn unitary_operator_conserves_output_norm() {
    let mut r = rng(9);
    for _ in 0..50 {
        let g = random_matrix(&mut r, 2);
        let q = g.qr().q();
        let a = Observable::new(q).unwrap();
        let f = polar_decompose_2x2(&a).unwrap();
        assert!(max_abs_diff(&f.r, &CMatrix::identity(2, 2)) < 1e-12);
        let phi = random_unit(&mut r, 2);
        for chi in [0.0, 0.7, 2.0] {
            let out = pipeline_state(&phi, &f, chi).unwrap();
            assert!((out.norm_squared() - 1.0).abs() < 1e-12);
            assert!(detector_intensity(&out) <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn uniform_grid_average_is_offset() {
    let mut r = rng(10);
    let a = Observable::new(random_matrix(&mut r, 2)).unwrap();
    let phi = random_unit(&mut r, 2);
    let f = polar_decompose_2x2(&a).unwrap();
    let grid: Vec<f64> = (0..32).map(|k| TAU * k as f64 / 32.0).collect();
    let res = intensity_curve(&phi, &f, &grid).unwrap();
    let mean = res.chi_samples.iter().map(|s| s.raw).sum::<f64>() / 32.0;
    assert!((mean - 0.25 * (1.0 + res.r2_expectation)).abs() < 1e-12);
}

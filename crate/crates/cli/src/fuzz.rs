//! Randomized checks of the uncertainty relations and the Fisher invariants.

use std::f64::consts::PI;
use std::sync::Arc;

use qcrb_core::bounds::{uncertainty_check, Observable};
use qcrb_core::fisher::fisher_report;
use qcrb_core::qstate::matrix::orthonormalize;
use qcrb_core::qstate::{
    c, eigen_curve_family, unitary_family, CMatrix, CVector, ComplexMatrix, DensityMatrix, GeneratedCurves, Generator,
    QuadraticGauge, StateFamily,
};
use qcrb_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Table, Value};

pub const UNCERTAINTY_TOLERANCE: f64 = 1e-10;
pub const INVARIANT_TOLERANCE: f64 = 1e-9;
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub violations: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(normal(rng), normal(rng)))
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    ComplexMatrix::new((&g + g.adjoint()) * c(0.5, 0.0)).expect("finite")
}

fn random_orthonormal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<CVector> {
    loop {
        let raw: Vec<CVector> = (0..k)
            .map(|_| CVector::from_fn(n, |_, _| c(normal(rng), normal(rng))))
            .collect();
        let basis = orthonormalize(&raw, 1e-8);
        if basis.len() == k {
            return basis;
        }
    }
}

/// Weights with relative gaps of at least 5% so the spectrum is
/// nondegenerate.
fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut acc = 0.0;
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            acc += 0.05 + rng.random_range(0.0..1.0);
            acc
        })
        .collect();
    w.reverse();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

struct Case {
    weights: Vec<f64>,
    vectors: Vec<CVector>,
    h: ComplexMatrix,
    theta: f64,
    beta: f64,
}

impl Case {
    fn draw(seed: u64, pure: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..5usize);
        let rank = if pure { 1 } else { rng.random_range(1..=n) };
        Self {
            weights: random_weights(&mut rng, rank),
            vectors: random_orthonormal(&mut rng, n, rank),
            h: random_hermitian(&mut rng, n),
            theta: rng.random_range(-1.0..1.0),
            beta: rng.random_range(0.0..3.1),
        }
    }

    fn matrix_family(&self) -> Result<StateFamily, Error> {
        unitary_family(&DensityMatrix::mixture(&self.weights, &self.vectors)?, &self.h)
    }

    fn curves(&self) -> Result<GeneratedCurves, Error> {
        GeneratedCurves::new(
            self.weights.clone(),
            self.vectors.clone(),
            Generator::dense(self.h.as_matrix(), 1e-12)?,
        )
    }
}

/// Runs `check` on `cases` seeded draws; the check returns the worst
/// residual of that case.
fn suite<F>(name: &'static str, cases: usize, seed: u64, tolerance: f64, check: F) -> Result<SuiteResult, Error>
where
    F: Fn(u64) -> Result<f64, Error> + Sync,
{
    let base = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ name.len() as u64;
    let residuals = (0..cases as u64)
        .into_par_iter()
        .map(|k| check(base.wrapping_add(k)))
        .collect::<Result<Vec<f64>, Error>>()?;
    Ok(SuiteResult {
        name,
        cases,
        violations: residuals.iter().filter(|&&r| !(r <= tolerance)).count(),
        worst_residual: residuals.iter().copied().fold(0.0, f64::max),
        tolerance,
    })
}

/// Uncertainty relations, strong and weak, on random states and operators.
fn uncertainty_suites(cases: usize, seed: u64, inject: bool) -> Result<[SuiteResult; 2], Error> {
    let tol = if inject { -1.0 } else { UNCERTAINTY_TOLERANCE };
    let draw = |k: u64| -> Result<_, Error> {
        let case = Case::draw(k, false);
        let mut rng = ChaCha8Rng::seed_from_u64(!k);
        let n = case.h.dim();
        let rho = DensityMatrix::mixture(&case.weights, &case.vectors)?;
        let a = Observable::new(random_matrix(&mut rng, n))?;
        let b = Observable::new(random_matrix(&mut rng, n))?;
        uncertainty_check(&rho, &a, &b)
    };
    let excess = |lhs: f64, rhs: f64| ((rhs - lhs) / lhs.max(1.0)).max(0.0);
    let strong = suite("uncertainty_strong", cases, seed, tol, |k| {
        let r = draw(k)?;
        Ok(excess(r.var_a * r.var_b, r.strong_rhs))
    })?;
    let weak = suite("uncertainty_weak", cases, seed, tol, |k| {
        let r = draw(k)?;
        Ok(excess(r.var_a * r.var_b, r.weak_rhs))
    })?;
    Ok([strong, weak])
}

pub fn run_suites(
    uncertainty_cases: usize,
    fisher_cases: usize,
    seed: u64,
    inject: bool,
) -> Result<Vec<SuiteResult>, Error> {
    let tol = |t: f64| if inject { -1.0 } else { t };
    let mut out: Vec<SuiteResult> = uncertainty_suites(uncertainty_cases, seed, inject)?.into();

    out.push(suite(
        "beta_zero_reduction",
        fisher_cases,
        seed,
        tol(INVARIANT_TOLERANCE),
        |k| {
            let case = Case::draw(k, false);
            let rep = fisher_report(&case.matrix_family()?, case.theta, 0.0)?;
            Ok(rel_diff(rep.f_nh1, rep.f_h))
        },
    )?);

    out.push(suite(
        "pure_beta_independence",
        fisher_cases,
        seed,
        tol(INVARIANT_TOLERANCE),
        |k| {
            let case = Case::draw(k, true);
            let fam = case.matrix_family()?;
            let at_zero = fisher_report(&fam, case.theta, 0.0)?;
            let beta = PI * case.beta / 3.1;
            let at_beta = fisher_report(&fam, case.theta, beta)?;
            Ok(rel_diff(at_beta.f_nh1, at_zero.f_nh1).max(rel_diff(at_beta.f_nh1, at_beta.f_h)))
        },
    )?);

    out.push(suite(
        "pure_nh2_quarter",
        fisher_cases,
        seed,
        tol(INVARIANT_TOLERANCE),
        |k| {
            let case = Case::draw(k, true);
            let rep = fisher_report(&case.matrix_family()?, case.theta, case.beta)?;
            Ok(rel_diff(rep.f_nh2, 0.25 * rep.f_h))
        },
    )?);

    out.push(suite(
        "gauge_invariance",
        fisher_cases,
        seed,
        tol(INVARIANT_TOLERANCE),
        |k| {
            let case = Case::draw(k, false);
            let curves = case.curves()?;
            let mut rng = ChaCha8Rng::seed_from_u64(k.rotate_left(17));
            let gauges = (0..case.weights.len())
                .map(|_| QuadraticGauge {
                    c1: rng.random_range(-3.0..3.0),
                    c2: rng.random_range(-3.0..3.0),
                })
                .collect();
            let plain = fisher_report(&eigen_curve_family(Arc::new(curves.clone())), case.theta, case.beta)?;
            let gauged = fisher_report(
                &eigen_curve_family(Arc::new(curves.with_gauges(gauges)?)),
                case.theta,
                case.beta,
            )?;
            Ok(rel_diff(plain.f_h, gauged.f_h)
                .max(rel_diff(plain.f_nh1, gauged.f_nh1))
                .max(rel_diff(plain.f_nh2, gauged.f_nh2)))
        },
    )?);

    out.push(suite(
        "eigen_vs_matrix",
        fisher_cases,
        seed,
        tol(ORACLE_TOLERANCE),
        |k| {
            let case = Case::draw(k, false);
            let m = fisher_report(&case.matrix_family()?, case.theta, case.beta)?;
            let e = fisher_report(&eigen_curve_family(Arc::new(case.curves()?)), case.theta, case.beta)?;
            Ok(rel_diff(m.f_h, e.f_h)
                .max(rel_diff(m.f_nh1, e.f_nh1))
                .max(rel_diff(m.f_nh2, e.f_nh2)))
        },
    )?);
    Ok(out)
}

/// The uncertainty suites use `samples` cases, the Fisher suites a
/// twentieth of that (at least one).
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fisher_cases = (cfg.samples / 20).max(1);
    let results = run_suites(cfg.samples, fisher_cases, cfg.seed, cfg.inject_fault)?;
    let mut t = Table::new(&["suite", "cases", "violations", "worst_residual", "tolerance"]);
    let mut total = 0;
    for r in &results {
        total += r.violations;
        t.push(vec![
            Value::from(r.name),
            Value::from(r.cases),
            Value::from(r.violations),
            Value::from(r.worst_residual),
            Value::from(r.tolerance),
        ]);
    }
    t.meta("inject_fault", cfg.inject_fault);
    t.meta("total_violations", total);
    Ok(Outcome {
        table: t,
        violation: total > 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_clean_and_deterministic() {
        let a = run_suites(200, 20, 5, false).unwrap();
        assert!(a.iter().all(|r| r.violations == 0), "{a:?}");
        assert_eq!(a, run_suites(200, 20, 5, false).unwrap());
    }

    #[test]
    fn injected_fault_flags_every_case() {
        let r = run_suites(10, 2, 5, true).unwrap();
        assert!(r.iter().all(|s| s.violations == s.cases));
    }
}

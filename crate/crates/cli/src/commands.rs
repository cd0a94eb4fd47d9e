use std::f64::consts::PI;

use qcrb_core::bounds::{
    sample_observables, saturation_scan_local, LocalModel, Observable, ObservableKind, SampleSource,
};
use qcrb_core::fisher::fisher_report;
use qcrb_core::interferometer::{closed_intensity, extract_expectation_noisy, measure};
use qcrb_core::models::{
    ghz_closed_forms, ghz_family, ghz_nonunitary_qfi, mz_closed_forms, mz_nonunitary_qfi, mz_reduced_forms, GhzConfig,
    MzConfig, MzModel,
};
use qcrb_core::qstate::{c, CMatrix, CVector, StateFamily, C64};
use qcrb_core::Error;
use rayon::prelude::*;

use crate::config::{Command, ModelChoice, NMax, ObservableKindArg, RunConfig};
use crate::error::CliError;
use crate::fuzz;
use crate::output::{Table, Value};

/// A rendered table plus whether the run found a bound violation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub violation: bool,
}

impl Outcome {
    fn clean(table: Table) -> Self {
        Self {
            table,
            violation: false,
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Fig1 => fig1(cfg).map(Outcome::clean),
        Command::Fig2 => fig2(cfg).map(Outcome::clean),
        Command::Fig3 => fig3(cfg).map(Outcome::clean),
        Command::Saturation => saturation(cfg),
        Command::MeasureDemo => measure_demo(cfg).map(Outcome::clean),
        Command::Fuzz => fuzz::run(cfg),
    }
}

fn alpha_phase(cfg: &RunConfig) -> f64 {
    if cfg.alpha_re == 0.0 && cfg.alpha_im == 0.0 {
        0.0
    } else {
        cfg.alpha_im.atan2(cfg.alpha_re)
    }
}

fn mz_config(cfg: &RunConfig, alpha: C64, p: f64) -> MzConfig {
    let mut m = MzConfig::new(alpha, p, cfg.splitter);
    m.r_mag = cfg.r_mag;
    m.phi = cfg.r_phase;
    m.gamma = cfg.gamma;
    m.n_max = match cfg.n_max {
        NMax::Auto => None,
        NMax::Fixed(n) => Some(n),
    };
    m
}

/// GHZ sweep over the mixing weight; values in units of `N^2`.
pub fn fig1(cfg: &RunConfig) -> Result<Table, CliError> {
    let n2 = (cfg.n_ions * cfg.n_ions) as f64;
    let rows = cfg
        .grid(0)
        .into_par_iter()
        .map(|p| {
            let ghz = GhzConfig {
                n_ions: cfg.n_ions,
                p,
                gamma: 0.0,
            };
            let rep = fisher_report(&ghz_family(&ghz)?, cfg.theta, cfg.beta)?;
            let cf = ghz_closed_forms(&ghz)?;
            let num = [rep.f_h / n2, rep.f_nh1 / n2, rep.f_nh2 / n2];
            let closed = [cf.f_h / n2, cf.f_nh1 / n2, cf.f_nh2 / n2];
            let mut row = vec![Value::from(p)];
            row.extend(num.iter().map(|&x| Value::from(x)));
            row.extend(closed.iter().map(|&x| Value::from(x)));
            row.extend(num.iter().zip(&closed).map(|(a, b)| Value::from((a - b).abs())));
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(&[
        "p",
        "f_h_over_n2",
        "f_nh1_over_n2",
        "f_nh2_over_n2",
        "closed_f_h_over_n2",
        "closed_f_nh1_over_n2",
        "closed_f_nh2_over_n2",
        "abs_dev_f_h",
        "abs_dev_f_nh1",
        "abs_dev_f_nh2",
    ]);
    t.meta("n_ions", cfg.n_ions);
    t.meta("beta", cfg.beta);
    t.meta("theta", cfg.theta);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Mach-Zehnder sweep over `(|alpha|^2, p)`.
pub fn fig2(cfg: &RunConfig) -> Result<Table, CliError> {
    let phase = alpha_phase(cfg);
    let points: Vec<(f64, f64)> = cfg
        .grid(0)
        .into_iter()
        .flat_map(|a2| cfg.grid(1).into_iter().map(move |p| (a2, p)))
        .collect();
    let rows = points
        .into_par_iter()
        .map(|(a2, p)| {
            if a2 < 0.0 {
                return Err(Error::InvalidArgument(format!("|alpha|^2 = {a2}")));
            }
            let m = mz_config(cfg, C64::from_polar(a2.sqrt(), phase), p);
            let model = MzModel::new(&m)?;
            let rep = fisher_report(&model.family()?, cfg.theta, cfg.beta)?;
            let cf = mz_closed_forms(&m)?;
            let reduced = mz_reduced_forms(&m)?;
            let num = [rep.f_h, rep.f_nh1, rep.f_nh2];
            let closed = [cf.f_h, cf.f_nh1, cf.f_nh2];
            let mut row = vec![
                Value::from(a2),
                Value::from(p),
                Value::from(model.n_max()),
                Value::from(model.tail_mass()),
            ];
            row.extend(num.iter().map(|&x| Value::from(x)));
            row.extend(closed.iter().map(|&x| Value::from(x)));
            row.push(Value::from(reduced.f_nh2));
            row.extend(num.iter().zip(&closed).map(|(a, b)| Value::from((a - b).abs())));
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(&[
        "alpha_sq",
        "p",
        "n_max",
        "tail_mass",
        "f_h",
        "f_nh1",
        "f_nh2",
        "closed_f_h",
        "closed_f_nh1",
        "closed_f_nh2",
        "reduced_f_nh2",
        "abs_dev_f_h",
        "abs_dev_f_nh1",
        "abs_dev_f_nh2",
    ]);
    t.meta("splitter", cfg.splitter_name());
    t.meta("r_mag", cfg.r_mag);
    t.meta("r_phase", cfg.r_phase);
    t.meta("beta", cfg.beta);
    t.meta("theta", cfg.theta);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Lossy pure-state QFI over `(theta / pi, gamma)` for both models.
pub fn fig3(cfg: &RunConfig) -> Result<Table, CliError> {
    let alpha = C64::from_polar(cfg.alpha_re.hypot(cfg.alpha_im), alpha_phase(cfg));
    let a2 = alpha.norm_sqr();
    let points: Vec<(ModelChoice, f64, f64)> = [ModelChoice::Ghz, ModelChoice::Mz]
        .into_iter()
        .flat_map(|m| {
            cfg.grid(0)
                .into_iter()
                .flat_map(move |t| cfg.grid(1).into_iter().map(move |g| (m, t, g)))
        })
        .collect();
    let family = |model: ModelChoice, gamma: f64| -> Result<StateFamily, Error> {
        match model {
            ModelChoice::Ghz => ghz_family(&GhzConfig {
                n_ions: cfg.n_ions,
                p: cfg.p,
                gamma,
            }),
            ModelChoice::Mz => {
                let mut m = mz_config(cfg, alpha, cfg.p);
                m.gamma = gamma;
                MzModel::new(&m)?.family()
            }
        }
    };
    let rows = points
        .into_par_iter()
        .map(|(model, t_units, gamma)| {
            let theta = PI * t_units;
            let numeric = fisher_report(&family(model, gamma)?, theta, cfg.beta)?.f_h;
            let unitary = fisher_report(&family(model, 0.0)?, theta, cfg.beta)?.f_h;
            let closed = match model {
                ModelChoice::Ghz => ghz_nonunitary_qfi(cfg.n_ions, gamma, theta),
                ModelChoice::Mz => mz_nonunitary_qfi(a2, gamma, theta),
            };
            Ok(vec![
                Value::from(model.to_string()),
                Value::from(theta),
                Value::from(t_units),
                Value::from(gamma),
                Value::from(numeric),
                Value::from(closed),
                Value::from((numeric - closed).abs()),
                Value::from(unitary),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(&[
        "model",
        "theta",
        "theta_over_pi",
        "gamma",
        "f_h_nonunitary",
        "closed_f_h_nonunitary",
        "abs_dev",
        "f_h_unitary",
    ]);
    t.meta("n_ions", cfg.n_ions);
    t.meta("alpha_sq", a2);
    t.meta("splitter", cfg.splitter_name());
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn saturation_family(cfg: &RunConfig) -> Result<StateFamily, Error> {
    match cfg.model {
        ModelChoice::Ghz => ghz_family(&GhzConfig {
            n_ions: cfg.n_ions,
            p: cfg.p,
            gamma: cfg.gamma,
        }),
        ModelChoice::Mz => {
            let alpha = C64::new(cfg.alpha_re, cfg.alpha_im);
            MzModel::new(&mz_config(cfg, alpha, cfg.p))?.family()
        }
    }
}

/// Error propagation over random observables on the model's local span,
/// plus the two optimal measurements.
pub fn saturation(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let family = saturation_family(cfg)?;
    let report = fisher_report(&family, cfg.theta, cfg.beta)?;
    let local = LocalModel::reduced(&family, cfg.theta)?;
    let kind = match cfg.kind {
        ObservableKindArg::Hermitian => ObservableKind::Hermitian,
        ObservableKindArg::NonHermitian => ObservableKind::NonHermitian,
    };
    let samples = sample_observables(local.dim(), cfg.samples, kind, cfg.seed);
    let result = saturation_scan_local(&local, &samples, &report)?;

    let mut t = Table::new(&["id", "source", "variance", "variance_times_f_h", "variance_times_f_nh2"]);
    let mut optimal = [None, None];
    for s in &result.samples {
        match s.source {
            SampleSource::OptimalNh2 => optimal[0] = s.variance_theta,
            SampleSource::OptimalSld => optimal[1] = s.variance_theta,
            SampleSource::Random(_) => {}
        }
        t.push(vec![
            Value::from(s.observable_id),
            Value::from(s.source.as_str()),
            Value::from(s.variance_theta),
            Value::from(s.variance_theta.map(|v| v * report.f_h)),
            Value::from(s.variance_theta.map(|v| v * report.f_nh2)),
        ]);
    }
    let inv = |f: f64| if f > 0.0 { Some(1.0 / f) } else { None };
    let sm = &result.summary;
    t.meta("model", cfg.model.to_string());
    t.meta("kind", cfg.kind.to_string());
    t.meta("samples", cfg.samples);
    t.meta("beta", cfg.beta);
    t.meta("theta", cfg.theta);
    t.meta("local_dim", local.dim());
    t.meta("f_h", report.f_h);
    t.meta("f_nh1", report.f_nh1);
    t.meta("f_nh2", report.f_nh2);
    t.meta("bound_f_h", inv(report.f_h));
    t.meta("bound_f_nh1", inv(report.f_nh1));
    t.meta("bound_f_nh2", inv(report.f_nh2));
    t.meta("min_hermitian", sm.min_hermitian);
    t.meta("min_nonhermitian", sm.min_nonhermitian);
    t.meta("below_f_h", sm.below_f_h);
    t.meta("below_f_nh1", sm.below_f_nh1);
    t.meta("below_f_nh2", sm.below_f_nh2);
    t.meta("zero_signal", sm.zero_signal);
    t.meta("optimal_nh2_variance", optimal[0]);
    t.meta("optimal_sld_variance", optimal[1]);
    let violation = sm.hermitian_violates_f_h || sm.violates_f_nh1;
    t.meta("violation", violation);
    Ok(Outcome { table: t, violation })
}

/// Parses `x`, `yi`, `x+yi`, `x-yi`, `i`, `-i` (whitespace ignored).
pub fn parse_complex(text: &str) -> Result<C64, CliError> {
    let s: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || CliError::Usage(format!("cannot parse complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|x| c(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign or the leading one
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(c(re, im))
}

pub fn parse_complex_list(text: &str, len: usize) -> Result<Vec<C64>, CliError> {
    let items = text.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
    if items.len() != len {
        return Err(CliError::Usage(format!(
            "expected {len} comma-separated entries, got {}",
            items.len()
        )));
    }
    Ok(items)
}

pub fn parse_observable(text: &str) -> Result<Observable, CliError> {
    let e = parse_complex_list(text, 4)?;
    Ok(Observable::new(CMatrix::from_row_slice(2, 2, &e))?)
}

/// Parsed and normalized input state.
pub fn parse_state(text: &str) -> Result<CVector, CliError> {
    let v = CVector::from_vec(parse_complex_list(text, 2)?);
    let norm = v.norm();
    if !(norm > 1e-300) || !norm.is_finite() {
        return Err(CliError::Usage(format!("state '{text}' has no usable norm")));
    }
    Ok(v / c(norm, 0.0))
}

/// Interferometric intensity curve for a 2x2 observable and input state.
pub fn measure_demo(cfg: &RunConfig) -> Result<Table, CliError> {
    let a = parse_observable(&cfg.observable)?;
    let phi = parse_state(&cfg.state)?;
    let grid = cfg.grid(0);
    let res = measure(&a, &phi, &grid)?;
    let mut t = Table::new(&["chi", "chi_over_pi", "raw", "normalized", "closed"]);
    for s in &res.chi_samples {
        t.push(vec![
            Value::from(s.chi),
            Value::from(s.chi / PI),
            Value::from(s.raw),
            Value::from(s.normalized),
            Value::from(closed_intensity(res.r2_expectation, res.direct_expectation, s.chi)),
        ]);
    }
    t.meta("observable", cfg.observable.clone());
    t.meta("state", cfg.state.clone());
    t.meta("r2_expectation", res.r2_expectation);
    t.meta("direct_modulus", res.direct_expectation.norm());
    t.meta("direct_phase", res.direct_expectation.arg());
    t.meta("extracted_modulus", res.extracted_modulus);
    t.meta("extracted_phase", res.extracted_phase);
    if let Some(shots) = cfg.shots {
        let fit = extract_expectation_noisy(&res.chi_samples, shots, cfg.seed)?;
        t.meta("shots_per_point", shots);
        t.meta("noisy_modulus", fit.modulus);
        t.meta("noisy_phase", fit.phase);
        t.meta("noisy_modulus_std_error", fit.modulus_std_error);
    }
    Ok(t)
}

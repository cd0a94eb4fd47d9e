use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fisher::{FisherReport, LocalSpectrum};
use crate::qstate::matrix::{c, frobenius, CMatrix, HermitianEigen};
use crate::qstate::{spectral_decompose_matrix, StateFamily, TangentMatrix, DEFAULT_EPS_RANK};

use super::observable::Observable;
use super::propagation::{error_propagation_local, optimal_measurement_nh2, optimal_measurement_sld};

/// Margin by which a variance must undercut `1/F` to count as below it.
pub const BELOW_BOUND_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservableKind {
    Hermitian,
    NonHermitian,
}

impl ObservableKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObservableKind::Hermitian => "hermitian",
            ObservableKind::NonHermitian => "nonhermitian",
        }
    }
}

/// Random observables of unit Frobenius norm: complex Ginibre matrices, or
/// `G + G^dagger` for the Hermitian kind. Deterministic in `seed`.
pub fn sample_observables(dim: usize, count: usize, kind: ObservableKind, seed: u64) -> Vec<Observable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = 0.5f64.sqrt();
    (0..count)
        .map(|_| {
            let g = CMatrix::from_fn(dim, dim, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                c(s * re, s * im)
            });
            let m = match kind {
                ObservableKind::Hermitian => &g + g.adjoint(),
                ObservableKind::NonHermitian => g,
            };
            let norm = frobenius(&m);
            Observable::new(m / c(norm, 0.0)).expect("finite")
        })
        .collect()
}

/// A state and tangent at one parameter value, possibly expressed in a
/// smaller orthonormal basis that contains every state and derivative.
#[derive(Debug, Clone)]
pub struct LocalModel {
    pub rho: CMatrix,
    pub drho: CMatrix,
    pub spectrum: LocalSpectrum,
}

impl LocalModel {
    pub fn from_parts(rho: CMatrix, drho: CMatrix) -> Result<Self> {
        let spec = spectral_decompose_matrix(&rho, DEFAULT_EPS_RANK)?;
        let drho_t = TangentMatrix::new(drho.clone(), 1e-9)?;
        Ok(Self {
            rho,
            drho,
            spectrum: LocalSpectrum { spec, drho: drho_t },
        })
    }

    /// Full-dimensional model.
    pub fn at(family: &StateFamily, theta: f64) -> Result<Self> {
        let rho = family.rho_at(theta)?;
        let drho = family.drho_at(theta)?;
        Self::from_parts(rho.matrix().clone(), drho.matrix().clone())
    }

    /// Model on the span of the eigen curves and their derivatives, built
    /// from their Gram matrix alone. Falls back to [`LocalModel::at`] for
    /// families without eigen curves.
    pub fn reduced(family: &StateFamily, theta: f64) -> Result<Self> {
        let Some(curves) = family.eigen_curves() else {
            return Self::at(family, theta);
        };
        let weights = curves.weights().to_vec();
        let m = weights.len();
        let gram = curves.gram(theta)?;
        if gram.nrows() != 2 * m {
            return Err(Error::DimensionMismatch {
                expected: 2 * m,
                found: gram.nrows(),
            });
        }
        let eig = HermitianEigen::new(&gram)?;
        let lmax = eig.values.iter().copied().fold(0.0, f64::max);
        let kept: Vec<usize> = (0..2 * m).filter(|&l| eig.values[l] > 1e-12 * lmax).collect();
        let r = kept.len();
        // column k holds the coordinates of vector k in the basis W sqrt(1/lambda)
        let coords = CMatrix::from_fn(r, 2 * m, |row, k| {
            let l = kept[row];
            eig.vectors[(k, l)].conj() * eig.values[l].sqrt()
        });
        let mut rho = CMatrix::zeros(r, r);
        let mut drho = CMatrix::zeros(r, r);
        for (i, &p) in weights.iter().enumerate() {
            let v = coords.column(i);
            let dv = coords.column(m + i);
            let cross = dv * v.adjoint();
            rho += v * v.adjoint() * c(p, 0.0);
            drho += (&cross + cross.adjoint()) * c(p, 0.0);
        }
        Self::from_parts(rho, drho)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSource {
    Random(ObservableKind),
    OptimalNh2,
    OptimalSld,
}

impl SampleSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            SampleSource::Random(k) => k.as_str(),
            SampleSource::OptimalNh2 => "optimal_nh2",
            SampleSource::OptimalSld => "optimal_sld",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationSample {
    pub observable_id: usize,
    pub source: SampleSource,
    /// `None` when the observable carries no signal.
    pub variance_theta: Option<f64>,
}

/// Aggregates over the random samples only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationSummary {
    pub min_hermitian: Option<f64>,
    pub min_nonhermitian: Option<f64>,
    pub below_f_h: usize,
    pub below_f_nh1: usize,
    pub below_f_nh2: usize,
    pub zero_signal: usize,
    /// A Hermitian sample beat `1/F_H`; contradicts the standard bound.
    pub hermitian_violates_f_h: bool,
    /// Some sample beat `1/F1`.
    pub violates_f_nh1: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationResult {
    pub samples: Vec<SaturationSample>,
    pub summary: SaturationSummary,
}

fn below(v: f64, f: f64) -> bool {
    if f <= 0.0 {
        return true;
    }
    v < 1.0 / f - BELOW_BOUND_MARGIN
}

fn fold_min(acc: Option<f64>, v: f64) -> Option<f64> {
    Some(acc.map_or(v, |a| a.min(v)))
}

/// Error propagation for every sample plus the two optimal measurements,
/// which are appended with ids `len` and `len + 1`.
pub fn saturation_scan_local(
    local: &LocalModel,
    samples: &[Observable],
    report: &FisherReport,
) -> Result<SaturationResult> {
    for a in samples {
        if a.dim() != local.dim() {
            return Err(Error::DimensionMismatch {
                expected: local.dim(),
                found: a.dim(),
            });
        }
    }
    let eval = |a: &Observable| -> Result<Option<f64>> {
        match error_propagation_local(&local.rho, &local.drho, a) {
            Ok(v) => Ok(Some(v)),
            Err(Error::ZeroSignalDerivative { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut out: Vec<SaturationSample> = samples
        .par_iter()
        .enumerate()
        .map(|(id, a)| {
            let source = SampleSource::Random(if a.is_hermitian() {
                ObservableKind::Hermitian
            } else {
                ObservableKind::NonHermitian
            });
            Ok(SaturationSample {
                observable_id: id,
                source,
                variance_theta: eval(a)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut summary = SaturationSummary {
        min_hermitian: None,
        min_nonhermitian: None,
        below_f_h: 0,
        below_f_nh1: 0,
        below_f_nh2: 0,
        zero_signal: 0,
        hermitian_violates_f_h: false,
        violates_f_nh1: false,
    };
    for s in &out {
        let Some(v) = s.variance_theta else {
            summary.zero_signal += 1;
            continue;
        };
        let hermitian = s.source == SampleSource::Random(ObservableKind::Hermitian);
        if hermitian {
            summary.min_hermitian = fold_min(summary.min_hermitian, v);
        } else {
            summary.min_nonhermitian = fold_min(summary.min_nonhermitian, v);
        }
        if below(v, report.f_h) {
            summary.below_f_h += 1;
            summary.hermitian_violates_f_h |= hermitian;
        }
        if below(v, report.f_nh1) {
            summary.below_f_nh1 += 1;
        }
        if below(v, report.f_nh2) {
            summary.below_f_nh2 += 1;
        }
    }
    summary.violates_f_nh1 = summary.below_f_nh1 > 0;

    let n = samples.len();
    for (offset, (source, a)) in [
        (SampleSource::OptimalNh2, optimal_measurement_nh2(&local.spectrum, 1.0)),
        (SampleSource::OptimalSld, optimal_measurement_sld(&local.spectrum, 1.0)),
    ]
    .into_iter()
    .enumerate()
    {
        out.push(SaturationSample {
            observable_id: n + offset,
            source,
            variance_theta: eval(&a)?,
        });
    }
    Ok(SaturationResult { samples: out, summary })
}

/// [`saturation_scan_local`] on the reduced model of `family` at `theta`.
pub fn saturation_scan(
    family: &StateFamily,
    theta: f64,
    samples: &[Observable],
    report: &FisherReport,
) -> Result<SaturationResult> {
    let local = LocalModel::reduced(family, theta)?;
    saturation_scan_local(&local, samples, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::{fisher_report, report_from_spectrum};
    use crate::models::{ghz_family, GhzConfig};

    #[test]
    fn sampling_is_deterministic_and_normalized() {
        let a = sample_observables(3, 5, ObservableKind::NonHermitian, 7);
        let b = sample_observables(3, 5, ObservableKind::NonHermitian, 7);
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|o| (frobenius(o.matrix()) - 1.0).abs() < 1e-12 && !o.is_hermitian()));
        let h = sample_observables(3, 5, ObservableKind::Hermitian, 7);
        assert!(h.iter().all(|o| o.is_hermitian()));
        assert_ne!(sample_observables(3, 5, ObservableKind::NonHermitian, 8), a);
    }

    #[test]
    fn reduced_model_matches_full() {
        let cfg = GhzConfig::new(3, 0.3);
        let full = crate::models::ghz_family_full(&cfg).unwrap();
        let reduced = LocalModel::reduced(&full, 0.2).unwrap();
        assert_eq!(reduced.dim(), 2);
        let expected = fisher_report(&full, 0.2, 0.5).unwrap();
        let got = report_from_spectrum(&reduced.spectrum, 0.5).unwrap();
        assert!((got.f_h - expected.f_h).abs() < 1e-9);
        assert!((got.f_nh1 - expected.f_nh1).abs() < 1e-9);
        assert!((got.f_nh2 - expected.f_nh2).abs() < 1e-9);
    }

    #[test]
    fn hermitian_samples_respect_qfi() {
        let fam = ghz_family(&GhzConfig::new(4, 0.25)).unwrap();
        let report = fisher_report(&fam, 0.3, std::f64::consts::PI).unwrap();
        let samples = sample_observables(2, 500, ObservableKind::Hermitian, 1);
        let res = saturation_scan(&fam, 0.3, &samples, &report).unwrap();
        assert_eq!(res.samples.len(), 502);
        assert!(!res.summary.hermitian_violates_f_h);
        assert_eq!(res.summary.below_f_h, 0);
        let sld = res.samples[501].variance_theta.unwrap();
        assert!((sld * report.f_h - 1.0).abs() < 1e-9);
        let nh2 = res.samples[500].variance_theta.unwrap();
        assert!((nh2 * report.f_nh2 - 1.0).abs() < 1e-9);
    }
}

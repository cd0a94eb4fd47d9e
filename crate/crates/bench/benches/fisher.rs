use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcrb_core::bounds::{sample_observables, saturation_scan_local, LocalModel, ObservableKind};
use qcrb_core::fisher::fisher_report;
use qcrb_core::models::{ghz_family, ghz_family_full, mz_family, GhzConfig, MzConfig, Splitter};
use qcrb_core::qstate::c;

fn eigen_form(cr: &mut Criterion) {
    let fam = ghz_family(&GhzConfig::new(8, 0.3)).unwrap();
    cr.bench_function("ghz_eigen_form", |b| {
        b.iter(|| fisher_report(black_box(&fam), 0.2, PI).unwrap())
    });
}

fn matrix_form(cr: &mut Criterion) {
    let mut group = cr.benchmark_group("ghz_matrix_form");
    for n in [3usize, 5, 6] {
        let fam = ghz_family_full(&GhzConfig::new(n, 0.3)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(1usize << n), &fam, |b, fam| {
            b.iter(|| fisher_report(black_box(fam), 0.2, 1.0).unwrap())
        });
    }
    group.finish();
}

fn mach_zehnder(cr: &mut Criterion) {
    let mut group = cr.benchmark_group("mz_report");
    for (label, splitter, r_mag) in [("bpi", Splitter::BPi, 0.5), ("bpi2_r2", Splitter::BPi2, 2.0)] {
        let mut cfg = MzConfig::new(c(3.0, 0.0), 0.3, splitter);
        cfg.r_mag = r_mag;
        group.bench_function(label, |b| {
            b.iter(|| fisher_report(&mz_family(black_box(&cfg)).unwrap(), 0.0, PI).unwrap())
        });
    }
    group.finish();
}

fn saturation(cr: &mut Criterion) {
    let fam = mz_family(&MzConfig::new(c(2.0, 0.0), 0.3, Splitter::BPi)).unwrap();
    let report = fisher_report(&fam, 0.0, PI).unwrap();
    let local = LocalModel::reduced(&fam, 0.0).unwrap();
    let samples = sample_observables(local.dim(), 1000, ObservableKind::NonHermitian, 1);
    cr.bench_function("saturation_scan_1000", |b| {
        b.iter(|| saturation_scan_local(&local, black_box(&samples), &report).unwrap())
    });
}

criterion_group!(benches, eigen_form, matrix_form, mach_zehnder, saturation);
criterion_main!(benches);

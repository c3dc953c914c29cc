use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phasecraft::interferometer::{counting_curve, parity_curve, CountingModel};
use phasecraft::metrology::{phase_averaged_state, qfi_mixed};
use phasecraft::probes::{solve_energy_constraint, ProbeFamily};
use phasecraft::study::{optimize_qooq_n, sample_random_components, DEFAULT_PHI_EVAL};
use phasecraft::{PathSymmetricProbe, PhaseGenerator, PhiGrid, TruncationPolicy};

fn probe(family: ProbeFamily, nav: f64) -> PathSymmetricProbe {
    let spec = solve_energy_constraint(family, nav).unwrap();
    PathSymmetricProbe::from_spec(&spec, &TruncationPolicy::default()).unwrap()
}

fn curves(c: &mut Criterion) {
    let grid = PhiGrid::default();
    let mut g = c.benchmark_group("curves");
    for (name, family) in [
        ("aooa", ProbeFamily::Coherent),
        ("soos", ProbeFamily::SqueezedVacuum),
        ("qooq100", ProbeFamily::OneN { n: 100 }),
    ] {
        let p = probe(family, 2.0);
        g.bench_with_input(BenchmarkId::new("parity", name), &p, |b, p| {
            b.iter(|| parity_curve(black_box(p), &grid, 0.9, name).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("counting", name), &p, |b, p| {
            b.iter(|| counting_curve(black_box(p), &grid, 0.9, name).unwrap())
        });
    }
    g.finish();
}

fn counting_tables(c: &mut Criterion) {
    let p = probe(ProbeFamily::SqueezedVacuum, 3.0);
    c.bench_function("counting_model_soos3", |b| {
        b.iter(|| CountingModel::new(black_box(&p), 0.9).unwrap())
    });
    let m = CountingModel::new(&p, 0.9).unwrap();
    c.bench_function("counting_fi_soos3", |b| b.iter(|| m.fisher_information(black_box(1.0))));
}

fn mixed_qfi(c: &mut Criterion) {
    let p = probe(ProbeFamily::SqueezedVacuum, 2.0);
    c.bench_function("qfi_mixed_soos2", |b| {
        b.iter(|| qfi_mixed(&phase_averaged_state(black_box(&p)), PhaseGenerator::SingleArm))
    });
}

fn study(c: &mut Criterion) {
    c.bench_function("optimize_qooq_t090", |b| {
        b.iter(|| optimize_qooq_n(0.9, black_box(2.0), 3..=40, DEFAULT_PHI_EVAL).unwrap())
    });
    c.bench_function("sample_1000", |b| {
        b.iter(|| sample_random_components(1000, 10, black_box(1), 0.9, DEFAULT_PHI_EVAL).unwrap())
    });
}

criterion_group!(benches, curves, counting_tables, mixed_qfi, study);
criterion_main!(benches);

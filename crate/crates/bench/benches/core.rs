use std::f64::consts::FRAC_PI_4;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use elgi_bench::{default_shots, equal_step_protocol, infeasible_marginals, spins};
use elgi_core::entropy::info_deficit;
use elgi_core::macrorealism::grand_feasibility;
use elgi_core::protocols::{joint3, MeasurementMode};
use elgi_core::qcore::rotation_unitary;
use elgi_core::sampling::estimate_deficit;
use elgi_core::Spin;

fn rotation(c: &mut Criterion) {
    let mut group = c.benchmark_group("rotation_unitary");
    for spin in spins() {
        group.bench_function(format!("s={spin}"), |b| {
            b.iter(|| rotation_unitary(spin, black_box(0.7)))
        });
    }
    group.finish();
}

fn three_time(c: &mut Criterion) {
    let mut group = c.benchmark_group("joint3");
    for mode in MeasurementMode::ALL {
        let cfg = equal_step_protocol(mode);
        group.bench_function(mode.as_str(), |b| b.iter(|| joint3(black_box(&cfg))));
    }
    group.finish();
}

fn feasibility(c: &mut Criterion) {
    let set = infeasible_marginals();
    c.bench_function("grand_feasibility", |b| b.iter(|| grand_feasibility(black_box(&set))));
}

fn deficit(c: &mut Criterion) {
    c.bench_function("info_deficit/analytic", |b| {
        b.iter(|| info_deficit(3, Spin::HALF, black_box(FRAC_PI_4), MeasurementMode::Analytic))
    });
    let shots = default_shots();
    c.bench_function("estimate_deficit/4096x10", |b| {
        b.iter(|| estimate_deficit(Spin::HALF, black_box(FRAC_PI_4), &shots, MeasurementMode::Analytic))
    });
}

criterion_group!(benches, rotation, three_time, feasibility, deficit);
criterion_main!(benches);

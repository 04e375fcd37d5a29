//! Criterion benchmarks for the hot paths of `fogcell`.

use std::hint::black_box;

use criterion::Criterion;
use fogcell::delay::linear_grid;
use fogcell::sim::run;
use fogcell::{
    calibrate, mean_throughput, p_hop_analytic, p_hop_monte_carlo, sweep_density, CalibrationGrid,
    CalibrationTarget, CellCapacity, DelayParams, FogCellConfig, HopMode, LinkParams, Scheme,
};

pub fn link(c: &mut Criterion) {
    let params = LinkParams::default();
    c.bench_function("p_hop_analytic/grid_1_to_50", |b| {
        b.iter(|| {
            (1..=50)
                .map(|d| p_hop_analytic(black_box(d as f64), &params).unwrap())
                .sum::<f64>()
        })
    });
    c.bench_function("p_hop_monte_carlo/10k", |b| {
        b.iter(|| p_hop_monte_carlo(black_box(25.0), &params, 10_000, 1).unwrap())
    });
}

pub fn delay(c: &mut Criterion) {
    let params = LinkParams::default();
    let dp = DelayParams::default();
    let rho = linear_grid(0.03, 0.20, 0.005).unwrap();
    c.bench_function("sweep_density/300m", |b| {
        b.iter(|| {
            sweep_density(black_box(300.0), &rho, &params, &dp, HopMode::Homogeneous).unwrap()
        })
    });

    let targets = [(300.0, 0.32e-3), (400.0, 0.46e-3), (500.0, 0.63e-3)]
        .map(|(l_a_m, delay_min_s)| CalibrationTarget { l_a_m, delay_min_s });
    let mut group = c.benchmark_group("calibrate");
    group.sample_size(10);
    group.bench_function("default_grid", |b| {
        b.iter(|| {
            calibrate(
                &targets,
                &CalibrationGrid::default(),
                &params,
                &dp,
                &rho,
                HopMode::Homogeneous,
            )
            .unwrap()
        })
    });
    group.finish();
}

pub fn allocation(c: &mut Criterion) {
    let cap = CellCapacity::default();
    for scheme in [Scheme::Traditional, Scheme::Adaptive] {
        c.bench_function(&format!("mean_throughput/{}/n30_10k", scheme.name()), |b| {
            b.iter(|| mean_throughput(scheme, black_box(30), &cap, 10_000, 3).unwrap())
        });
    }
}

pub fn mobility(c: &mut Criterion) {
    let cfg = FogCellConfig::default();
    let (params, cap) = (LinkParams::default(), CellCapacity::default());
    c.bench_function("fogcell_run/default", |b| {
        b.iter(|| run(black_box(&cfg), &params, &cap).unwrap())
    });
}

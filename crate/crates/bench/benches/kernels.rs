use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use zsl_core::equidistribution_bench::{weyl_sum, IndexTuple};
use zsl_core::function_space::CompactSetSpec;
use zsl_core::quadrature::{gk15, QuadratureSpec};
use zsl_core::universality_lab::{approximation_distance, AfeEvaluator, ExperimentConfig, Target};
use zsl_core::zeta_eval::dirichlet::{eval_direct, eval_points};
use zsl_core::zeta_eval::{zeta_afe, zeta_em, AfeParams};
use zsl_core::{Complex64, ComplexPoint, ShiftFunction, ShiftTuple};

fn dirichlet(c: &mut Criterion) {
    let one = |_: usize| Complex64::new(1.0, 0.0);
    let k = CompactSetSpec::new((0.70, 0.72), (-0.05, 0.05), (16, 16)).unwrap();
    let points = k.grid().shifted_points(1.0e5);
    let n = 4000;
    c.bench_function("eval_points 256 pts, N=4000", |b| {
        b.iter(|| eval_points(n, one, black_box(&points)))
    });
    c.bench_function("eval_direct 256 pts, N=4000", |b| {
        b.iter(|| {
            points
                .iter()
                .map(|&s| eval_direct(n, &one, black_box(s)))
                .collect::<Vec<_>>()
        })
    });
}

fn zeta(c: &mut Criterion) {
    let s = ComplexPoint::new(0.75, 1.0e4);
    let p = AfeParams::for_height(s.t, AfeParams::DEFAULT_C, AfeParams::DEFAULT_KAPPA);
    c.bench_function("zeta_afe t=1e4", |b| b.iter(|| zeta_afe(black_box(s), &p)));
    c.bench_function("zeta_em t=1e3", |b| {
        b.iter(|| zeta_em(black_box(Complex64::new(0.75, 1.0e3)), 30))
    });
}

fn quadrature(c: &mut Criterion) {
    let f = |x: f64| Complex64::new(0.0, 5.0 * x).exp();
    c.bench_function("gk15 panel", |b| b.iter(|| gk15(&f, black_box(0.0), 0.1)));
    let s = ShiftTuple::single(ShiftFunction::exponential(1.0, 1.0).unwrap()).unwrap();
    let idx = IndexTuple::new(vec![2], vec![vec![1]]).unwrap();
    let q = QuadratureSpec::default();
    c.bench_function("weyl_sum e^t, T=4", |b| b.iter(|| weyl_sum(&idx, &s, black_box(4.0), &q)));
}

fn distance(c: &mut Criterion) {
    let k = CompactSetSpec::new((0.70, 0.72), (-0.05, 0.05), (16, 16)).unwrap();
    let shifts = ShiftTuple::single(ShiftFunction::exponential(0.5, 1.0).unwrap()).unwrap();
    let target = Target::constant(Complex64::new(1.0, 0.0)).unwrap();
    let cfg = ExperimentConfig::new(k, shifts, vec![target], 12.0);
    let eval = AfeEvaluator::default();
    c.bench_function("approximation_distance r=1, tau=18", |b| {
        b.iter(|| approximation_distance(&eval, black_box(18.0), &cfg))
    });
}

criterion_group!(benches, dirichlet, zeta, quadrature, distance);
criterion_main!(benches);

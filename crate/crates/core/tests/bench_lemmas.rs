use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zsl_core::equidistribution_bench::*;
use zsl_core::quadrature::QuadratureSpec;
use zsl_core::shift_families::{ShiftFunction, ShiftTuple};
use zsl_core::Error;

fn exp1() -> ShiftFunction {
    ShiftFunction::exponential(1.0, 1.0).unwrap()
}

#[test]
fn delta_ratio_exact_for_builtins() {
    let q = QuadratureSpec::default();
    let shifts = [
        exp1(),
        ShiftFunction::exponential(0.5, 2.0).unwrap(),
        ShiftFunction::monomial_exp(1, 1.0, 2.0).unwrap(),
    ];
    for f in &shifts {
        for &c in &[1.5, 2.0] {
            let r = weighted_mean_square_ratio(&CoefficientSpec::delta(), 0.75, 3.0, c, f, &q).unwrap();
            assert!((r.ratio - (c - 1.0)).abs() < 1e-8, "{} c={c}: {}", f.name(), r.ratio);
        }
    }
}

#[test]
fn ones_ratio_stable_and_consistent() {
    let q = QuadratureSpec::default();
    let f = exp1();
    let ones = CoefficientSpec::ones();
    let r3 = weighted_mean_square_ratio(&ones, 0.75, 3.0, 2.0, &f, &q).unwrap();
    let r4 = weighted_mean_square_ratio(&ones, 0.75, 4.0, 2.0, &f, &q).unwrap();
    assert!(r3.ratio.is_finite() && r3.ratio > 0.0 && r3.converged);
    assert!(r4.ratio / r3.ratio < 2.0 && r3.ratio / r4.ratio < 2.0, "{} {}", r3.ratio, r4.ratio);

    let t_dom = weighted_mean_square_ratio_t_domain(&ones, 0.75, 3.0, 2.0, &f, &q).unwrap();
    assert!((t_dom.ratio - r3.ratio).abs() <= 1e-6 * r3.ratio, "{} {}", t_dom.ratio, r3.ratio);

    // Doubling the quadrature resolution leaves the value unchanged.
    let fine = QuadratureSpec {
        max_phase: q.max_phase / 2.0,
        ..q
    };
    let r3f = weighted_mean_square_ratio(&ones, 0.75, 3.0, 2.0, &f, &fine).unwrap();
    assert!((r3f.ratio - r3.ratio).abs() <= 1e-9 * r3.ratio);
}

#[test]
fn oscillatory_examples() {
    let q = QuadratureSpec::default();
    let l2 = 2f64.ln();
    let m = l2 * 3f64.exp();
    let r = oscillatory_bound_check(&|x: f64| l2 * x.exp(), &|x: f64| l2 * x.exp(), m, 3.0, 6.0, &q).unwrap();
    assert!(r.pass && (r.bound - 4.0 / m).abs() < 1e-15 && r.bound < 0.2886);

    let r = oscillatory_bound_check(&|x: f64| x * x, &|x: f64| 2.0 * x, 2.0, 1.0, 2.0, &q).unwrap();
    assert!(r.modulus <= 2.0 && r.pass);
}

#[test]
fn oscillatory_random_monotone_phases() {
    let q = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50 {
        let a: f64 = rng.gen_range(0.0..2.0);
        let b = a + rng.gen_range(0.5..5.0);
        let k: f64 = rng.gen_range(0.5..20.0);
        let (r, m) = match case % 3 {
            0 => {
                let p: f64 = rng.gen_range(1.2..3.0);
                // F(x) = k (x − a + 0.1)^p with F' increasing from its value at a.
                let m = k * p * 0.1f64.powf(p - 1.0);
                let r = oscillatory_bound_check(
                    &|x: f64| k * (x - a + 0.1).powf(p),
                    &|x: f64| k * p * (x - a + 0.1).powf(p - 1.0),
                    m,
                    a,
                    b,
                    &q,
                );
                (r, m)
            }
            1 => {
                let rate: f64 = rng.gen_range(0.1..1.5);
                let m = k * rate * (rate * a).exp();
                let r = oscillatory_bound_check(
                    &|x: f64| k * (rate * x).exp(),
                    &|x: f64| k * rate * (rate * x).exp(),
                    m,
                    a,
                    b,
                    &q,
                );
                (r, m)
            }
            _ => {
                // Decreasing negative slope: F(x) = −k x − log(1 + x).
                let m = k + 1.0 / (1.0 + b);
                let r = oscillatory_bound_check(
                    &|x: f64| -k * x - (1.0 + x).ln(),
                    &|x: f64| -k - 1.0 / (1.0 + x),
                    m,
                    a,
                    b,
                    &q,
                );
                (r, m)
            }
        };
        let r = r.unwrap();
        assert!(r.pass, "case {case}: {} > {}", r.modulus, 4.0 / m);
    }
}

#[test]
fn weyl_single_exponential() {
    let q = QuadratureSpec::default();
    let s = ShiftTuple::single(exp1()).unwrap();
    let idx = IndexTuple::new(vec![2], vec![vec![1]]).unwrap();
    let r = weyl_sum(&idx, &s, 3.0, &q).unwrap();
    let bound = 4.0 / (2f64.ln() * 3f64.exp() * 3.0);
    assert!((r.bound.unwrap() - bound).abs() < 1e-12);
    assert!(r.abs <= bound, "{} > {bound}", r.abs);
    let zero = weyl_sum(&IndexTuple::zero(vec![2], 1).unwrap(), &s, 3.0, &q).unwrap();
    assert_eq!(zero.value, Complex64::new(1.0, 0.0));
}

#[test]
fn weyl_pair_decreasing() {
    let q = QuadratureSpec::default();
    let s = ShiftTuple::new(vec![exp1(), ShiftFunction::exponential(2.0, 1.0).unwrap()]).unwrap();
    let idx = IndexTuple::new(vec![2], vec![vec![1], vec![0]]).unwrap();
    let vals: Vec<f64> = [3.0, 4.0, 5.0]
        .iter()
        .map(|&t| weyl_sum(&idx, &s, t, &q).unwrap().abs)
        .collect();
    assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");

    let both = IndexTuple::new(vec![2], vec![vec![1], vec![1]]).unwrap();
    let a = weyl_sum(&both, &s, 3.0, &q).unwrap();
    let b = weyl_sum(&both, &s, 4.0, &q).unwrap();
    assert!(a.abs > b.abs);
    assert!(a.abs <= a.bound.unwrap() && b.abs <= b.bound.unwrap());
    match weyl_sum(&both, &s, 5.0, &q) {
        Err(Error::PanelBudget { max_t }) => assert!(max_t > 4.0 && max_t < 5.0, "{max_t}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn discrepancy_examples() {
    let s = ShiftTuple::single(exp1()).unwrap();
    let d = torus_discrepancy(&s, &[2], 5.0, 10_000, 9).unwrap();
    assert!(d.discrepancy < 0.05, "{}", d.discrepancy);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 10_000;
    let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let null = box_discrepancy(&pts, 1000, 5).unwrap();
    assert!(null < 3.0 / (n as f64).sqrt(), "{null}");

    let pair = ShiftTuple::new(vec![exp1(), exp1()]).unwrap();
    let diag = torus_discrepancy(&pair, &[2], 5.0, 10_000, 9).unwrap();
    assert!(diag.discrepancy >= 0.2, "{}", diag.discrepancy);
}

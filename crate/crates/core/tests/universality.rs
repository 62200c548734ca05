use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zsl_core::function_space::{region_from_k, GridFunction};
use zsl_core::universality_lab::*;
use zsl_core::zeta_eval::{zeta_afe, zeta_em, zeta_smoothed, AfeParams, ComplexPoint};
use zsl_core::*;

fn k4() -> CompactSetSpec {
    CompactSetSpec::new((0.70, 0.72), (-0.05, 0.05), (4, 4)).unwrap()
}

fn half() -> ShiftFunction {
    ShiftFunction::exponential(0.5, 1.0).unwrap()
}

fn one() -> Target {
    Target::constant(Complex64::new(1.0, 0.0)).unwrap()
}

fn small_cfg(members: Vec<ShiftFunction>, targets: Vec<Target>) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(k4(), ShiftTuple::new(members).unwrap(), targets, 12.0);
    c.n_tau = 120;
    c.seed = 7;
    c
}

#[test]
fn shifted_eval_matches_oracle() {
    let kp = CompactSetSpec::new((0.75, 0.75), (0.0, 0.0), (2, 2)).unwrap();
    let tuple = ShiftTuple::single(half()).unwrap();
    let out = shifted_tuple_eval(&AfeEvaluator::default(), &kp.grid(), 12.0, &tuple).unwrap();
    assert_eq!(out.len(), 1);
    let h = 6f64.exp();
    let s = Complex64::new(0.75, h);
    let p = AfeParams::for_height(h, 4.0, 10.0);
    let afe = zeta_afe(ComplexPoint::new(0.75, h), &p).unwrap();
    let oracle = zeta_em(s, 30).unwrap().value;
    assert!((out[0].values()[0] - afe.value).norm() < 1e-12);
    assert!((afe.value - oracle).norm() <= afe.envelope);
}

#[test]
fn shape_and_identical_members() {
    let tuple = ShiftTuple::new(vec![half(), half()]).unwrap();
    let out = shifted_tuple_eval(&AfeEvaluator::default(), &k4().grid(), 13.0, &tuple).unwrap();
    assert_eq!(out.len(), 2);
    assert_eq!(out[0].grid(), &k4().grid());
    assert_eq!(out[0], out[1]);
}

#[test]
fn self_target_distance_zero() {
    let tuple = ShiftTuple::single(half()).unwrap();
    let ev = AfeEvaluator::default();
    let g = shifted_tuple_eval(&ev, &k4().grid(), 14.5, &tuple).unwrap();
    let cfg = small_cfg(vec![half()], vec![Target::Tabulated(g[0].values().to_vec())]);
    assert_eq!(approximation_distance(&ev, 14.5, &cfg).unwrap(), 0.0);
    assert!(approximation_distance(&ev, 14.6, &cfg).unwrap() > 0.0);
}

#[test]
fn triangle_control() {
    let ev = AfeEvaluator::default();
    let grid = k4().grid();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let eta = 0.05;
    let exp_p = Target::ExpPoly(vec![Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)]);
    let base = exp_p.on_grid(&grid).unwrap();
    let perturbed: Vec<Complex64> = base
        .values()
        .iter()
        .map(|v| v + Complex64::from_polar(rng.gen_range(0.0..eta), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let gap = zsl_core::function_space::sup_norm_on_k(
        &GridFunction::new(grid, perturbed.clone()).unwrap(),
        &base,
        &k4(),
    )
    .unwrap();
    assert!(gap <= eta);
    let cf = small_cfg(vec![half()], vec![Target::Tabulated(perturbed)]);
    let cp = small_cfg(vec![half()], vec![exp_p]);
    for _ in 0..10 {
        let tau = rng.gen_range(12.0..24.0);
        let df = approximation_distance(&ev, tau, &cf).unwrap();
        let dp = approximation_distance(&ev, tau, &cp).unwrap();
        assert!((df - dp).abs() <= gap + 1e-12);
    }
    // Densities on the shared sample: ε for f dominates ε − η for e^p.
    let par = Parallelism::fixed(1);
    let rf = density_estimate(&cf, &ev, &par).unwrap();
    let rp = density_estimate(&cp, &ev, &par).unwrap();
    for eps in [0.5, 0.75, 1.0] {
        assert!(rf.hit_fraction_at(eps, cf.n_tau) >= rp.hit_fraction_at(eps - gap, cp.n_tau));
    }
}

#[test]
fn density_basics() {
    let ev = AfeEvaluator::default();
    let par = Parallelism::fixed(1);
    let mut cfg = small_cfg(vec![half()], vec![one()]);
    cfg.epsilon = 1e6;
    let r = density_estimate(&cfg, &ev, &par).unwrap();
    assert_eq!(r.hit_fraction, 1.0);
    assert_eq!(r.records.len(), cfg.n_tau);
    let f: Vec<f64> = [0.2, 0.5, 1.0].iter().map(|&e| r.hit_fraction_at(e, cfg.n_tau)).collect();
    assert!(f[0] <= f[1] && f[1] <= f[2]);
    let best = r.records.iter().map(|x| x.distance).fold(f64::INFINITY, f64::min);
    assert_eq!(best, r.best_distance);
    assert!(r.records.iter().all(|x| x.distance >= 0.0));
}

#[test]
fn distance_invariant_under_joint_permutation() {
    let ev = AfeEvaluator::default();
    let other = ShiftFunction::exponential(0.6, 1.0).unwrap();
    let t12 = Target::constant(Complex64::new(1.2, 0.0)).unwrap();
    let a = small_cfg(vec![half(), other.clone()], vec![one(), t12.clone()]);
    let b = small_cfg(vec![other, half()], vec![t12, one()]);
    for tau in [12.5, 17.0, 21.3] {
        assert_eq!(approximation_distance(&ev, tau, &a).unwrap(), approximation_distance(&ev, tau, &b).unwrap());
    }
}

#[test]
fn density_reproducible_across_threads() {
    let ev = AfeEvaluator::default();
    let cfg = small_cfg(vec![half()], vec![one()]);
    let a = density_estimate(&cfg, &ev, &Parallelism::fixed(1)).unwrap();
    let b = density_estimate(&cfg, &ev, &Parallelism::fixed(3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn stub_has_no_usable_samples_when_rejecting() {
    struct Rejecting;
    impl ZetaEvaluator for Rejecting {
        fn eval(&self, _: &[Complex64]) -> zsl_core::Result<Vec<Complex64>> {
            Err(Error::HeightCap { height: 1.0, cap: 0.5 })
        }
        fn height_cap(&self) -> f64 {
            0.5
        }
    }
    let cfg = small_cfg(vec![half()], vec![one()]);
    assert_eq!(
        density_estimate(&cfg, &Rejecting, &Parallelism::fixed(1)).unwrap_err(),
        Error::NoUsableSamples { cap: 0.5 }
    );
}

#[test]
fn truncation_long_x_near_floor() {
    // With X beyond the AFE sum length ζ_X keeps every AFE term with weight one.
    let h = 6f64.exp();
    let s = ComplexPoint::new(0.71, h);
    let p = AfeParams::for_height(h, 4.0, 10.0);
    let afe = zeta_afe(s, &p).unwrap();
    let zx = zeta_smoothed(s, 4.0 * p.x).unwrap();
    assert!((afe.value - zx).norm() <= afe.envelope, "{} {}", (afe.value - zx).norm(), afe.envelope);
}

#[test]
fn truncation_report_shape() {
    let ev = AfeEvaluator::default();
    let cfg = small_cfg(vec![half()], vec![one()]);
    let r = truncation_discrepancy(&cfg, &[50.0, 100.0], &ev, &Parallelism::fixed(1)).unwrap();
    assert_eq!(r.means.len(), 2);
    assert!(r.means.iter().all(|&m| (0.0..1.0).contains(&m)));
    assert!(truncation_discrepancy(&cfg, &[100.0, 50.0], &ev, &Parallelism::fixed(1)).is_err());
    assert!(region_from_k(&cfg.k).is_ok());
}

#[test]
fn random_model_deterministic_and_centered() {
    let ev = AfeEvaluator::default();
    let mut cfg = small_cfg(vec![half()], vec![one()]);
    cfg.x = 50.0;
    let par = Parallelism::fixed(1);
    let a = random_model_compare(&cfg, 500, Functional::ReLog { sigma: 0.76 }, &ev, &par).unwrap();
    let b = random_model_compare(&cfg, 500, Functional::ReLog { sigma: 0.76 }, &ev, &par).unwrap();
    assert_eq!(a, b);
    assert!((a.haar_mean - 1.0).norm() <= 3.0 * a.haar_std_error);
    assert!(!a.degenerate);
    let sup = random_model_compare(&cfg, 500, Functional::SupDistance, &ev, &par).unwrap();
    assert!(sup.random.iter().all(|&d| d >= 0.0));
}

#[test]
fn degenerate_functional_flagged() {
    let cfg = small_cfg(vec![half()], vec![one()]);
    let r = random_model_compare(
        &cfg,
        500,
        Functional::ReLog { sigma: 0.76 },
        &ConstantEvaluator(Complex64::new(2.0, 0.0)),
        &Parallelism::fixed(1),
    )
    .unwrap();
    assert!(r.degenerate);
}

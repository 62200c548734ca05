//! Universality experiments: shifted evaluation of ζ on a compact set,
//! distances to targets, density of good shifts, truncation and random-model
//! comparisons.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{
    exhaustion_sets, joint_metric, region_from_k, sup_norm_on_k, CompactSetSpec, GridFunction, GridSpec,
    DEFAULT_LEVELS, DEFAULT_REGION_GRID,
};
use crate::parallel::Parallelism;
use crate::shift_families::ShiftTuple;
use crate::zeta_eval::omega::shared_sieve;
use crate::zeta_eval::{
    params_for_points, smoothed_length, zeta_afe_points, zeta_smoothed_points, zeta_smoothed_random_points,
    AfeParams, OmegaAssignment, MAX_HEIGHT,
};

pub const MAX_POLY_DEGREE: usize = 16;
pub const DEFAULT_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Evaluates ζ at a batch of points.
pub trait ZetaEvaluator: Sync {
    fn eval(&self, points: &[Complex64]) -> Result<Vec<Complex64>>;

    /// Largest height accepted.
    fn height_cap(&self) -> f64 {
        MAX_HEIGHT
    }
}

/// ζ via the approximate functional equation with the default length policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeEvaluator {
    pub c: f64,
    pub kappa: f64,
}

impl Default for AfeEvaluator {
    fn default() -> Self {
        Self {
            c: AfeParams::DEFAULT_C,
            kappa: AfeParams::DEFAULT_KAPPA,
        }
    }
}

impl ZetaEvaluator for AfeEvaluator {
    fn eval(&self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        let height = points.iter().map(|p| p.im.abs()).fold(0.0, f64::max);
        if height > MAX_HEIGHT {
            return Err(Error::HeightCap {
                height,
                cap: MAX_HEIGHT,
            });
        }
        zeta_afe_points(points, &params_for_points(points, self.c, self.kappa))
    }
}

/// Returns the same value everywhere; stands in for ζ in tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEvaluator(pub Complex64);

impl ZetaEvaluator for ConstantEvaluator {
    fn eval(&self, points: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(vec![self.0; points.len()])
    }
}

/// Target function `f_j` on `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// `e^{p(s)}` with `p(s) = Σ_k c_k s^k`.
    ExpPoly(Vec<Complex64>),
    /// Nonvanishing samples on the K grid.
    Tabulated(Vec<Complex64>),
}

impl Target {
    /// The constant `c ≠ 0`, as `e^{log c}`.
    pub fn constant(c: Complex64) -> Result<Self> {
        if c == Complex64::new(0.0, 0.0) {
            return Err(Error::TargetVanishes { index: 0 });
        }
        Ok(Target::ExpPoly(vec![c.ln()]))
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        match self {
            Target::ExpPoly(c) => {
                if c.is_empty() || c.len() > MAX_POLY_DEGREE + 1 {
                    return Err(Error::InvalidParameter(format!(
                        "polynomial needs 1..={} coefficients, got {}",
                        MAX_POLY_DEGREE + 1,
                        c.len()
                    )));
                }
                Ok(())
            }
            Target::Tabulated(v) => {
                if v.len() != grid.len() {
                    return Err(Error::LengthMismatch {
                        left: v.len(),
                        right: grid.len(),
                    });
                }
                if let Some(i) = v.iter().position(|z| z.norm() == 0.0) {
                    return Err(Error::TargetVanishes { index: i });
                }
                Ok(())
            }
        }
    }

    pub fn on_grid(&self, grid: &GridSpec) -> Result<GridFunction> {
        self.validate(grid)?;
        match self {
            Target::ExpPoly(c) => GridFunction::from_fn(*grid, |s| {
                c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * s + ck).exp()
            }),
            Target::Tabulated(v) => GridFunction::new(*grid, v.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// One uniform draw in each of `n` equal strata of `[T, 2T]`.
    Stratified,
    /// Golden-ratio sequence with a seeded offset.
    LowDiscrepancy,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub k: CompactSetSpec,
    pub shifts: ShiftTuple,
    pub targets: Vec<Target>,
    pub epsilon: f64,
    pub t: f64,
    pub n_tau: usize,
    /// Truncation parameter of ζ_X in comparisons.
    pub x: f64,
    pub seed: u64,
    pub sampling: Sampling,
    pub region_grid: (usize, usize),
    pub levels: usize,
}

impl ExperimentConfig {
    pub fn new(k: CompactSetSpec, shifts: ShiftTuple, targets: Vec<Target>, t: f64) -> Self {
        Self {
            k,
            shifts,
            targets,
            epsilon: 0.75,
            t,
            n_tau: 2000,
            x: 200.0,
            seed: 0,
            sampling: Sampling::Stratified,
            region_grid: DEFAULT_REGION_GRID,
            levels: DEFAULT_LEVELS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.k.validate()?;
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.n_tau < 100 {
            return Err(Error::InvalidParameter(format!("n_tau must be at least 100, got {}", self.n_tau)));
        }
        if self.targets.len() != self.shifts.len() {
            return Err(Error::LengthMismatch {
                left: self.targets.len(),
                right: self.shifts.len(),
            });
        }
        let grid = self.k.grid();
        for t in &self.targets {
            t.validate(&grid)?;
        }
        let t_min = self.shifts.members().iter().map(|f| f.t0()).fold(f64::MIN, f64::max);
        if !(self.t >= t_min && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "T = {} lies below the common domain start {t_min}",
                self.t
            )));
        }
        let height = self.max_height();
        if height > MAX_HEIGHT {
            return Err(Error::HeightCap {
                height,
                cap: MAX_HEIGHT,
            });
        }
        Ok(())
    }

    /// `max_j γ_j(2T) + max |Im K|`.
    pub fn max_height(&self) -> f64 {
        let top = self
            .shifts
            .members()
            .iter()
            .map(|f| f.log_value(2.0 * self.t))
            .fold(f64::MIN, f64::max);
        top.exp() + self.k.max_abs_t() + 0.5
    }
}

/// Sample points in `[T, 2T]`, in sample order.
pub fn tau_samples(t: f64, n: usize, sampling: Sampling, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match sampling {
        Sampling::Stratified => (0..n)
            .map(|i| t + t * (i as f64 + rng.gen::<f64>()) / n as f64)
            .collect(),
        Sampling::LowDiscrepancy => {
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let u0: f64 = rng.gen();
            (0..n).map(|i| t + t * (u0 + i as f64 * g).fract()).collect()
        }
    }
}

/// `s ↦ ζ(s + iγ_j(τ))` on a grid, for each `j`.
pub fn shifted_tuple_eval<E: ZetaEvaluator + ?Sized>(
    eval: &E,
    grid: &GridSpec,
    tau: f64,
    shifts: &ShiftTuple,
) -> Result<Vec<GridFunction>> {
    shifts
        .members()
        .iter()
        .map(|f| {
            let h = f.try_value(tau)?;
            let values = eval.eval(&grid.shifted_points(h))?;
            GridFunction::new(*grid, values)
        })
        .collect()
}

/// `D(τ) = max_j sup_K |ζ(s + iγ_j(τ)) − f_j(s)|`.
pub fn approximation_distance<E: ZetaEvaluator + ?Sized>(eval: &E, tau: f64, cfg: &ExperimentConfig) -> Result<f64> {
    let grid = cfg.k.grid();
    let targets: Vec<GridFunction> = cfg.targets.iter().map(|t| t.on_grid(&grid)).collect::<Result<_>>()?;
    distance_with_targets(eval, tau, cfg, &targets)
}

fn distance_with_targets<E: ZetaEvaluator + ?Sized>(
    eval: &E,
    tau: f64,
    cfg: &ExperimentConfig,
    targets: &[GridFunction],
) -> Result<f64> {
    let shifted = shifted_tuple_eval(eval, &cfg.k.grid(), tau, &cfg.shifts)?;
    let mut d = 0.0f64;
    for (g, f) in shifted.iter().zip(targets) {
        d = d.max(sup_norm_on_k(g, f, &cfg.k)?);
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauRecord {
    pub tau: f64,
    pub heights: Vec<f64>,
    pub distance: f64,
    pub hit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub epsilon: f64,
    pub hit_fraction: f64,
    pub best_tau: f64,
    pub best_distance: f64,
    /// `(level, value)` pairs.
    pub quantiles: Vec<(f64, f64)>,
    /// Samples rejected by the evaluator's range checks.
    pub rejected: usize,
    pub records: Vec<TauRecord>,
}

impl DensityReport {
    /// Hit fraction at another threshold on the same samples.
    pub fn hit_fraction_at(&self, epsilon: f64, n_tau: usize) -> f64 {
        self.records.iter().filter(|r| r.distance < epsilon).count() as f64 / n_tau as f64
    }
}

/// Empirical quantile by linear interpolation of sorted data.
pub fn quantile(sorted: &[f64], level: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = level.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (sorted[j] - sorted[i]) * (pos - i as f64)
}

pub fn density_estimate<E: ZetaEvaluator + ?Sized>(
    cfg: &ExperimentConfig,
    eval: &E,
    par: &Parallelism,
) -> Result<DensityReport> {
    cfg.validate()?;
    let grid = cfg.k.grid();
    let targets: Vec<GridFunction> = cfg.targets.iter().map(|t| t.on_grid(&grid)).collect::<Result<_>>()?;
    let taus = tau_samples(cfg.t, cfg.n_tau, cfg.sampling, cfg.seed);
    let outcomes = par.map_indexed(taus.len(), |i| distance_with_targets(eval, taus[i], cfg, &targets));

    let mut records = Vec::with_capacity(taus.len());
    let mut rejected = 0;
    for (tau, out) in taus.iter().zip(outcomes) {
        match out {
            Ok(d) => records.push(TauRecord {
                tau: *tau,
                heights: cfg.shifts.members().iter().map(|f| f.value(*tau)).collect(),
                distance: d,
                hit: d < cfg.epsilon,
            }),
            Err(e) if e.is_rejection() => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    if records.is_empty() {
        return Err(Error::NoUsableSamples {
            cap: eval.height_cap(),
        });
    }
    let hits = records.iter().filter(|r| r.hit).count();
    let best = records
        .iter()
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
        .expect("nonempty");
    let mut sorted: Vec<f64> = records.iter().map(|r| r.distance).collect();
    sorted.sort_by(f64::total_cmp);
    Ok(DensityReport {
        epsilon: cfg.epsilon,
        hit_fraction: hits as f64 / cfg.n_tau as f64,
        best_tau: best.tau,
        best_distance: best.distance,
        quantiles: DEFAULT_QUANTILES.iter().map(|&q| (q, quantile(&sorted, q))).collect(),
        rejected,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub x_values: Vec<f64>,
    /// Mean of `d̄(ζ, ζ_X)` over the τ sample, per X.
    pub means: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub samples: usize,
}

/// Monte Carlo estimate of `(1/T) ∫_T^{2T} d̄(ζ(·+iγ(τ)), ζ_X(·+iγ(τ))) dτ` for each X.
pub fn truncation_discrepancy<E: ZetaEvaluator + ?Sized>(
    cfg: &ExperimentConfig,
    x_list: &[f64],
    eval: &E,
    par: &Parallelism,
) -> Result<TruncationReport> {
    cfg.validate()?;
    if x_list.is_empty() || x_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("X values must be nonempty and ascending".into()));
    }
    for &x in x_list {
        smoothed_length(x)?;
    }
    let region = region_from_k(&cfg.k)?;
    let ex = exhaustion_sets(&region, cfg.levels)?;
    let grid = region.grid(cfg.region_grid.0, cfg.region_grid.1);
    let taus = tau_samples(cfg.t, cfg.n_tau, cfg.sampling, cfg.seed);

    let rows = par.map_indexed(taus.len(), |i| -> Result<Vec<f64>> {
        let zeta = shifted_tuple_eval(eval, &grid, taus[i], &cfg.shifts)?;
        x_list
            .iter()
            .map(|&x| {
                let trunc: Vec<GridFunction> = cfg
                    .shifts
                    .members()
                    .iter()
                    .map(|f| {
                        let v = zeta_smoothed_points(&grid.shifted_points(f.value(taus[i])), x)?;
                        GridFunction::new(grid, v)
                    })
                    .collect::<Result<_>>()?;
                Ok(joint_metric(&zeta, &trunc, &ex)?.value)
            })
            .collect()
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let n = rows.len() as f64;
    let mut means = Vec::new();
    let mut std_errors = Vec::new();
    for k in 0..x_list.len() {
        let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        let m = crate::summation::mean(&col);
        let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        means.push(m);
        std_errors.push((var / n).sqrt());
    }
    Ok(TruncationReport {
        x_values: x_list.to_vec(),
        means,
        std_errors,
        samples: rows.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// `Re log ζ = log |ζ|` of the first component at `σ + i·(centre of K)`.
    ReLog { sigma: f64 },
    /// `max_j sup_K |ζ_j − f_j|`.
    SupDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomModelReport {
    pub functional: Functional,
    pub x: f64,
    /// Sorted samples of the functional over τ.
    pub shifted: Vec<f64>,
    /// Sorted samples over ω.
    pub random: Vec<f64>,
    pub ks_gap: f64,
    /// Mean of `ζ_X(s, ω)` over ω at the functional's point.
    pub haar_mean: Complex64,
    pub haar_std_error: f64,
    pub degenerate: bool,
}

/// `sup |F_1 − F_2|` between two empirical distribution functions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut gap) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        gap = gap.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    gap
}

/// Seed of the `i`-th ω sample (component `j`).
fn omega_seed(seed: u64, i: usize, j: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((i as u64) << 8)
        .wrapping_add(j as u64 + 1)
}

fn functional_point(cfg: &ExperimentConfig, f: Functional) -> Complex64 {
    match f {
        Functional::ReLog { sigma } => Complex64::new(sigma, cfg.k.center().im),
        Functional::SupDistance => cfg.k.center(),
    }
}

/// Compares the law of a functional of `ζ(s + iγ(τ))` over τ with its law
/// under the random model `ζ_X(s, ω)` over ω.
pub fn random_model_compare<E: ZetaEvaluator + ?Sized>(
    cfg: &ExperimentConfig,
    n_omega: usize,
    functional: Functional,
    eval: &E,
    par: &Parallelism,
) -> Result<RandomModelReport> {
    cfg.validate()?;
    if n_omega < 500 {
        return Err(Error::InvalidParameter(format!("n_omega must be at least 500, got {n_omega}")));
    }
    if let Functional::ReLog { sigma } = functional {
        if !(0.5 < sigma && sigma < 1.0) {
            return Err(Error::InvalidParameter(format!("sigma must lie in (1/2, 1), got {sigma}")));
        }
    }
    let n_terms = smoothed_length(cfg.x)?;
    let sieve = shared_sieve(n_terms as u64)?;
    let grid = cfg.k.grid();
    let targets: Vec<GridFunction> = cfg.targets.iter().map(|t| t.on_grid(&grid)).collect::<Result<_>>()?;
    let point = functional_point(cfg, functional);
    let taus = tau_samples(cfg.t, cfg.n_tau, cfg.sampling, cfg.seed);

    let shifted = par.map_indexed(taus.len(), |i| -> Result<f64> {
        match functional {
            Functional::ReLog { .. } => {
                let h = cfg.shifts.members()[0].try_value(taus[i])?;
                let z = eval.eval(&[point + Complex64::new(0.0, h)])?[0];
                Ok(z.norm().ln())
            }
            Functional::SupDistance => distance_with_targets(eval, taus[i], cfg, &targets),
        }
    });
    let mut shifted: Vec<f64> = shifted.into_iter().collect::<Result<_>>()?;

    let r = cfg.shifts.len();
    let samples = par.map_indexed(n_omega, |i| -> Result<(f64, Complex64)> {
        let omega0 = OmegaAssignment::sample_with_sieve(omega_seed(cfg.seed, i, 0), sieve.clone());
        let at_point = zeta_smoothed_random_points(&[point], &omega0, cfg.x)?[0];
        let value = match functional {
            Functional::ReLog { .. } => at_point.norm().ln(),
            Functional::SupDistance => {
                let mut d = 0.0f64;
                for (j, target) in targets.iter().enumerate().take(r) {
                    let omega = if j == 0 {
                        omega0.clone()
                    } else {
                        OmegaAssignment::sample_with_sieve(omega_seed(cfg.seed, i, j), sieve.clone())
                    };
                    let g = GridFunction::new(grid, zeta_smoothed_random_points(&grid.points(), &omega, cfg.x)?)?;
                    d = d.max(sup_norm_on_k(&g, target, &cfg.k)?);
                }
                d
            }
        };
        Ok((value, at_point))
    });
    let samples: Vec<(f64, Complex64)> = samples.into_iter().collect::<Result<_>>()?;
    let mut random: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let values: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
    let haar_mean = crate::zeta_eval::complex_mean(&values);
    let n = values.len() as f64;
    let var = values.iter().map(|v| (v - haar_mean).norm_sqr()).sum::<f64>() / (n - 1.0);

    shifted.sort_by(f64::total_cmp);
    random.sort_by(f64::total_cmp);
    let spread = |v: &[f64]| v[v.len() - 1] - v[0];
    let degenerate = spread(&shifted) == 0.0 || spread(&random) == 0.0;
    Ok(RandomModelReport {
        functional,
        x: cfg.x,
        ks_gap: ks_two_sample(&shifted, &random),
        shifted,
        random,
        haar_mean,
        haar_std_error: (var / n).sqrt(),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_families::ShiftFunction;

    fn cfg(targets: Vec<Target>) -> ExperimentConfig {
        let k = CompactSetSpec::new((0.70, 0.72), (-0.05, 0.05), (4, 4)).unwrap();
        let f = ShiftFunction::exponential(0.5, 1.0).unwrap();
        let mut c = ExperimentConfig::new(k, ShiftTuple::single(f).unwrap(), targets, 12.0);
        c.n_tau = 100;
        c
    }

    #[test]
    fn stub_constant_distance() {
        let c = cfg(vec![Target::constant(Complex64::new(1.2, 0.0)).unwrap()]);
        let d = approximation_distance(&ConstantEvaluator(Complex64::new(1.0, 0.0)), 13.0, &c).unwrap();
        assert!((d - 0.2).abs() < 1e-14);
    }

    #[test]
    fn stratified_samples_cover_strata() {
        let t = tau_samples(12.0, 100, Sampling::Stratified, 3);
        for (i, tau) in t.iter().enumerate() {
            assert!(*tau >= 12.0 + 0.12 * i as f64 && *tau < 12.0 + 0.12 * (i + 1) as f64);
        }
        let ld = tau_samples(12.0, 100, Sampling::LowDiscrepancy, 3);
        assert!(ld.iter().all(|&x| (12.0..24.0).contains(&x)));
    }

    #[test]
    fn vanishing_targets_rejected() {
        assert!(Target::constant(Complex64::new(0.0, 0.0)).is_err());
        let k = CompactSetSpec::new((0.7, 0.72), (0.0, 0.1), (2, 2)).unwrap();
        let t = Target::Tabulated(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert_eq!(t.validate(&k.grid()), Err(Error::TargetVanishes { index: 1 }));
        assert!(Target::ExpPoly(vec![Complex64::new(0.0, 0.0); 18]).validate(&k.grid()).is_err());
    }

    #[test]
    fn ks_gap_basic() {
        assert_eq!(ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[2.0, 3.0]), 1.0);
        assert!((ks_two_sample(&[0.0, 2.0], &[1.0, 3.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.0);
        assert_eq!(quantile(&v, 0.0), 0.0);
        assert!((quantile(&v, 0.3) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn height_cap_enforced() {
        let mut c = cfg(vec![Target::constant(Complex64::new(1.0, 0.0)).unwrap()]);
        c.t = 20.0;
        assert!(matches!(c.validate(), Err(Error::HeightCap { .. })));
    }
}

//! Numerical checks of the analytic lemmas: the weighted mean-value bound,
//! the first-derivative bound for oscillatory integrals, Weyl sums on finite
//! tori and the equidistribution of prime-indexed phases.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::Parallelism;
use crate::primes::is_prime_u64;
use crate::quadrature::{integrate_edges, phase_panels, QuadratureSpec};
use crate::shift_families::{ShiftFunction, ShiftTuple};
use crate::summation::NeumaierSum;
use crate::zeta_eval::dirichlet::{eval_direct, LineExpansion};

/// Upper limit on `γ(cT)`, the longest Dirichlet polynomial in the mean-value check.
pub const SUM_LENGTH_CAP: f64 = 1e6;
/// Largest torus dimension `r·|𝒫₀|` for the discrepancy estimator.
pub const MAX_TORUS_DIM: usize = 6;
pub const MAX_INDEX: i64 = 64;
pub const DEFAULT_BOXES: usize = 1000;
const GROWTH_DELTA: f64 = 0.1;

/// One line of a lemma check, as written to reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub lemma: String,
    pub parameters: BTreeMap<String, String>,
    pub computed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub pass: bool,
    pub panels_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientGenerator {
    /// `a_1 = 1`, all others zero.
    Delta,
    Ones,
    Sequence(Vec<Complex64>),
}

/// Coefficients `a_n`, zero beyond `cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSpec {
    pub generator: CoefficientGenerator,
    pub cutoff: usize,
}

impl CoefficientSpec {
    pub fn delta() -> Self {
        Self {
            generator: CoefficientGenerator::Delta,
            cutoff: usize::MAX,
        }
    }

    pub fn ones() -> Self {
        Self {
            generator: CoefficientGenerator::Ones,
            cutoff: usize::MAX,
        }
    }

    pub fn sequence(values: Vec<Complex64>) -> Self {
        let cutoff = values.len();
        Self {
            generator: CoefficientGenerator::Sequence(values),
            cutoff,
        }
    }

    pub fn coefficient(&self, n: usize) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if n == 0 || n > self.cutoff {
            return zero;
        }
        match &self.generator {
            CoefficientGenerator::Delta => {
                if n == 1 {
                    Complex64::new(1.0, 0.0)
                } else {
                    zero
                }
            }
            CoefficientGenerator::Ones => Complex64::new(1.0, 0.0),
            CoefficientGenerator::Sequence(v) => v.get(n - 1).copied().unwrap_or(zero),
        }
    }

    /// Indices `n ≤ limit` with `a_n ≠ 0`, ascending.
    pub fn support(&self, limit: usize) -> Vec<usize> {
        let limit = limit.min(self.cutoff);
        match &self.generator {
            CoefficientGenerator::Delta => {
                if limit >= 1 {
                    vec![1]
                } else {
                    vec![]
                }
            }
            CoefficientGenerator::Ones => (1..=limit).collect(),
            CoefficientGenerator::Sequence(v) => (1..=limit.min(v.len()))
                .filter(|&n| v[n - 1] != Complex64::new(0.0, 0.0))
                .collect(),
        }
    }

    /// Indices where `|a_n| > n^{0.1}`.
    pub fn growth_violations(&self) -> Vec<usize> {
        match &self.generator {
            CoefficientGenerator::Sequence(v) => (1..=v.len().min(self.cutoff))
                .filter(|&n| v[n - 1].norm() > (n as f64).powf(GROWTH_DELTA))
                .collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValueReport {
    pub ratio: f64,
    pub integral: f64,
    pub denominator: f64,
    pub error: f64,
    pub panels: u64,
    pub converged: bool,
}

fn check_mean_value_inputs(sigma: f64, t: f64, c: f64, f: &ShiftFunction) -> Result<()> {
    if !(0.5 < sigma && sigma < 1.0) {
        return Err(Error::InvalidParameter(format!("need 1/2 < sigma < 1, got {sigma}")));
    }
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("need c > 1, got {c}")));
    }
    if !(t >= f.t0()) {
        return Err(Error::InvalidParameter(format!(
            "T = {t} lies below the domain start {}",
            f.t0()
        )));
    }
    if f.log_value(c * t) > SUM_LENGTH_CAP.ln() {
        return Err(Error::SumLengthCap {
            max_ct: f.inverse(SUM_LENGTH_CAP),
        });
    }
    Ok(())
}

fn denominator(coef: &CoefficientSpec, sigma: f64, t: f64, n_top: usize) -> f64 {
    let s: NeumaierSum = coef
        .support(n_top)
        .into_iter()
        .map(|n| coef.coefficient(n).norm_sqr() * (n as f64).powf(-2.0 * sigma))
        .collect();
    t * s.value()
}

/// Largest support index not exceeding `y`.
fn active_length(support: &[usize], y: f64) -> usize {
    let k = support.partition_point(|&n| (n as f64) <= y);
    if k == 0 {
        0
    } else {
        support[k - 1]
    }
}

/// `∫_T^{cT} |Σ_{n≤γ(u)} a_n n^{-σ-iγ(u)}|² du / (T Σ_{n≤γ(cT)} |a_n|² n^{-2σ})`.
///
/// The integrand is smooth between the points `γ⁻¹(n)` where the sum gains a
/// term; each such piece is covered by phase-bounded panels.
pub fn weighted_mean_square_ratio(
    coef: &CoefficientSpec,
    sigma: f64,
    t: f64,
    c: f64,
    f: &ShiftFunction,
    q: &QuadratureSpec,
) -> Result<MeanValueReport> {
    q.validate()?;
    check_mean_value_inputs(sigma, t, c, f)?;
    let (lo, hi) = (t, c * t);
    let y_hi = f.value(hi);
    let n_top = y_hi.floor() as usize;
    let support = coef.support(n_top);
    let y_lo = f.value(lo);

    let mut cuts = vec![lo];
    cuts.extend(
        support
            .iter()
            .filter(|&&n| (n as f64) > y_lo)
            .map(|&n| f.inverse(n as f64).clamp(lo, hi)),
    );
    cuts.push(hi);
    cuts.dedup();

    let coeff = |n: usize| coef.coefficient(n);
    let pieces = Parallelism::from_env().map_indexed(cuts.len() - 1, |i| {
        let (a, b) = (cuts[i], cuts[i + 1]);
        if b <= a {
            return Ok(None);
        }
        let n_eff = active_length(&support, f.value(0.5 * (a + b)));
        if n_eff == 0 {
            return Ok(None);
        }
        let ln_n = (n_eff as f64).ln();
        let edges = phase_panels(&|u| f.derivative(u) * ln_n, a, b, &[], q)?;
        let exp = LineExpansion::new(n_eff, &coeff, sigma, f.value(a), f.value(b));
        let integrand = |u: f64| Complex64::new(exp.eval(f.value(u)).norm_sqr(), 0.0);
        Ok(Some(integrate_edges(&integrand, &edges, q.abs_tol * (b - a) / (hi - lo))))
    });

    let mut total = NeumaierSum::new();
    let (mut error, mut panels, mut converged) = (0.0, 0u64, true);
    for p in pieces {
        if let Some(r) = p? {
            total.add(r.value.re);
            error += r.error;
            panels += r.panels;
            converged &= r.converged;
        }
    }
    if panels > q.max_panels {
        return Err(Error::PanelBudget { max_t: f64::NAN });
    }
    let integral = total.value();
    let den = denominator(coef, sigma, t, n_top);
    Ok(MeanValueReport {
        ratio: integral / den,
        integral,
        denominator: den,
        error,
        panels,
        converged,
    })
}

/// The same ratio computed in the `t`-domain with weight `(γ⁻¹)′(t)` and direct sums.
pub fn weighted_mean_square_ratio_t_domain(
    coef: &CoefficientSpec,
    sigma: f64,
    t: f64,
    c: f64,
    f: &ShiftFunction,
    q: &QuadratureSpec,
) -> Result<MeanValueReport> {
    q.validate()?;
    check_mean_value_inputs(sigma, t, c, f)?;
    let (y_lo, y_hi) = (f.value(t), f.value(c * t));
    let n_top = y_hi.floor() as usize;
    let support = coef.support(n_top);
    let mut cuts = vec![y_lo];
    cuts.extend(support.iter().map(|&n| n as f64).filter(|&y| y > y_lo && y < y_hi));
    cuts.push(y_hi);

    let coeff = |n: usize| coef.coefficient(n);
    let mut total = NeumaierSum::new();
    let (mut error, mut panels, mut converged) = (0.0, 0u64, true);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n_eff = active_length(&support, 0.5 * (a + b));
        if n_eff == 0 || b <= a {
            continue;
        }
        let ln_n = (n_eff as f64).ln();
        let edges = phase_panels(&|_| ln_n, a, b, &[], q)?;
        let integrand = |y: f64| {
            let v = eval_direct(n_eff, &coeff, Complex64::new(sigma, y));
            Complex64::new(v.norm_sqr() * f.inverse_derivative(y), 0.0)
        };
        let r = integrate_edges(&integrand, &edges, q.abs_tol * (b - a) / (y_hi - y_lo));
        total.add(r.value.re);
        error += r.error;
        panels += r.panels;
        converged &= r.converged;
    }
    let integral = total.value();
    let den = denominator(coef, sigma, t, n_top);
    Ok(MeanValueReport {
        ratio: integral / den,
        integral,
        denominator: den,
        error,
        panels,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryReport {
    pub modulus: f64,
    pub bound: f64,
    pub pass: bool,
    pub panels: u64,
    pub converged: bool,
}

/// Integrates `e^{iF}` on `[a, b]` and compares the modulus with `4/m`.
///
/// `F'` must be monotone with `|F'| ≥ m`; this is checked on a grid first.
pub fn oscillatory_bound_check<P, D>(
    phase: &P,
    dphase: &D,
    m: f64,
    a: f64,
    b: f64,
    q: &QuadratureSpec,
) -> Result<OscillatoryReport>
where
    P: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    q.validate()?;
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("need a < b, got [{a}, {b}]")));
    }
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("need m > 0, got {m}")));
    }
    const CHECKS: usize = 1000;
    let slopes: Vec<f64> = (0..=CHECKS)
        .map(|i| dphase(a + (b - a) * i as f64 / CHECKS as f64))
        .collect();
    if let Some(i) = slopes.iter().position(|d| d.abs() < m * (1.0 - 1e-12)) {
        return Err(Error::Precondition(format!(
            "|F'| = {} < m = {m} at x = {}",
            slopes[i].abs(),
            a + (b - a) * i as f64 / CHECKS as f64
        )));
    }
    let sign_flip = slopes.windows(2).any(|w| w[0].signum() != w[1].signum());
    let up = slopes.windows(2).all(|w| w[1] >= w[0]);
    let down = slopes.windows(2).all(|w| w[1] <= w[0]);
    if sign_flip || !(up || down) {
        return Err(Error::Precondition("F' is not monotone of one sign".into()));
    }
    let edges = phase_panels(dphase, a, b, &[], q)?;
    let r = integrate_edges(&|x: f64| Complex64::from_polar(1.0, phase(x)), &edges, q.abs_tol);
    let modulus = r.value.norm();
    let bound = 4.0 / m;
    Ok(OscillatoryReport {
        modulus,
        bound,
        pass: modulus <= bound,
        panels: r.panels,
        converged: r.converged,
    })
}

/// Primes `𝒫₀` and integer exponents `n_{jp}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexTuple {
    pub primes: Vec<u64>,
    /// One row per shift, one column per prime.
    pub n: Vec<Vec<i64>>,
}

impl IndexTuple {
    pub fn new(primes: Vec<u64>, n: Vec<Vec<i64>>) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::InvalidParameter("prime set must be nonempty".into()));
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("primes must be strictly increasing".into()));
        }
        if let Some(p) = primes.iter().find(|&&p| !is_prime_u64(p)) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        for row in &n {
            if row.len() != primes.len() {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: primes.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| v.abs() > MAX_INDEX) {
                return Err(Error::InvalidParameter(format!(
                    "index {v} exceeds the bound {MAX_INDEX}"
                )));
            }
        }
        Ok(Self { primes, n })
    }

    pub fn zero(primes: Vec<u64>, r: usize) -> Result<Self> {
        let cols = primes.len();
        Self::new(primes, vec![vec![0; cols]; r])
    }

    pub fn rows(&self) -> usize {
        self.n.len()
    }

    pub fn is_zero(&self) -> bool {
        self.n.iter().flatten().all(|&v| v == 0)
    }

    /// `c_j = Σ_p n_{jp} log p`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.n
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.primes)
                    .map(|(&k, &p)| k as f64 * (p as f64).ln())
                    .collect::<NeumaierSum>()
                    .value()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub t: f64,
    pub value: Complex64,
    pub abs: f64,
    /// `min |Σ c_j γ'_j|` over `[T, 2T]`.
    pub min_slope: f64,
    /// `4/(m T)` when the phase derivative keeps one sign.
    pub bound: Option<f64>,
    pub panels: u64,
    pub converged: bool,
}

fn phase_swing(members: &[ShiftFunction], c: &[f64], t: f64) -> f64 {
    members
        .iter()
        .zip(c)
        .filter(|(_, &cj)| cj != 0.0)
        .map(|(f, &cj)| cj.abs() * (f.value(2.0 * t) - f.value(t)))
        .sum()
}

/// `g_T = (1/T) ∫_T^{2T} exp(−i Σ_j c_j γ_j(τ)) dτ`.
pub fn weyl_sum(idx: &IndexTuple, shifts: &ShiftTuple, t: f64, q: &QuadratureSpec) -> Result<WeylReport> {
    q.validate()?;
    if idx.rows() != shifts.len() {
        return Err(Error::LengthMismatch {
            left: idx.rows(),
            right: shifts.len(),
        });
    }
    let members = shifts.members();
    let t_min = members.iter().map(|f| f.t0()).fold(f64::MIN, f64::max);
    if !(t >= t_min && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "T = {t} lies below the common domain start {t_min}"
        )));
    }
    if idx.is_zero() {
        return Ok(WeylReport {
            t,
            value: Complex64::new(1.0, 0.0),
            abs: 1.0,
            min_slope: 0.0,
            bound: None,
            panels: 0,
            converged: true,
        });
    }
    let c = idx.coefficients();
    let active: Vec<(&ShiftFunction, f64)> = members
        .iter()
        .zip(&c)
        .filter(|(_, &cj)| cj != 0.0)
        .map(|(f, &cj)| (f, cj))
        .collect();
    let limit = active.iter().map(|(f, _)| f.overflow_limit()).fold(f64::MAX, f64::min);
    if 2.0 * t > limit {
        return Err(Error::Overflow {
            tau: 2.0 * t,
            limit,
        });
    }
    let budget = q.max_panels as f64 * q.max_phase;
    if phase_swing(members, &c, t) > budget {
        let (mut good, mut bad) = (t_min, t);
        for _ in 0..100 {
            let mid = 0.5 * (good + bad);
            if phase_swing(members, &c, mid) <= budget {
                good = mid;
            } else {
                bad = mid;
            }
        }
        return Err(Error::PanelBudget { max_t: good });
    }

    let phase = |tau: f64| -> f64 { active.iter().map(|(f, cj)| cj * f.value(tau)).sum() };
    let dphase = |tau: f64| -> f64 { active.iter().map(|(f, cj)| cj * f.derivative(tau)).sum() };
    let edges = phase_panels(&dphase, t, 2.0 * t, &[], q)?;
    let r = integrate_edges(&|tau: f64| Complex64::from_polar(1.0, -phase(tau)), &edges, q.abs_tol * t);
    let value = r.value / t;

    const SLOPE_GRID: usize = 256;
    let slopes: Vec<f64> = (0..=SLOPE_GRID)
        .map(|i| dphase(t + t * i as f64 / SLOPE_GRID as f64))
        .collect();
    let min_slope = slopes.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    let one_sign = slopes.iter().all(|&d| d > 0.0) || slopes.iter().all(|&d| d < 0.0);
    Ok(WeylReport {
        t,
        value,
        abs: value.norm(),
        min_slope,
        bound: (one_sign && min_slope > 0.0).then(|| 4.0 / (min_slope * t)),
        panels: r.panels,
        converged: r.converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub discrepancy: f64,
    pub dimension: usize,
    pub samples: usize,
    pub boxes: usize,
}

/// Estimated star discrepancy: the largest gap between empirical mass and
/// volume over `n_boxes` random anchored boxes `[0, b)`.
pub fn box_discrepancy(points: &[Vec<f64>], n_boxes: usize, seed: u64) -> Result<f64> {
    let dim = points.first().map(|p| p.len()).unwrap_or(0);
    if points.is_empty() || dim == 0 {
        return Err(Error::InvalidParameter("need a nonempty point set".into()));
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidParameter("points differ in dimension".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = points.len() as f64;
    let mut worst = 0.0f64;
    for _ in 0..n_boxes {
        let b: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let volume: f64 = b.iter().product();
        let inside = points
            .iter()
            .filter(|p| p.iter().zip(&b).all(|(x, y)| x < y))
            .count();
        worst = worst.max((inside as f64 / n - volume).abs());
    }
    Ok(worst)
}

/// Angles `−γ_j(τ) log p` on the unit torus, one coordinate per (j, p).
pub fn torus_point(shifts: &ShiftTuple, primes: &[u64], tau: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(shifts.len() * primes.len());
    for f in shifts.members() {
        let g = f.value(tau);
        for &p in primes {
            v.push((-g * (p as f64).ln() / TAU).rem_euclid(1.0));
        }
    }
    v
}

/// Discrepancy of `τ ↦ ((p^{-iγ_j(τ)})_p)_j` for `τ` uniform on `[T, 2T]`.
pub fn torus_discrepancy(
    shifts: &ShiftTuple,
    primes: &[u64],
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<DiscrepancyReport> {
    let dim = shifts.len() * primes.len();
    if dim > MAX_TORUS_DIM {
        return Err(Error::DimensionCap {
            dim,
            cap: MAX_TORUS_DIM,
        });
    }
    if dim == 0 {
        return Err(Error::InvalidParameter("prime set must be nonempty".into()));
    }
    if n_samples < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 samples, got {n_samples}"
        )));
    }
    let limit = shifts
        .members()
        .iter()
        .map(|f| f.overflow_limit())
        .fold(f64::MAX, f64::min);
    if 2.0 * t > limit {
        return Err(Error::Overflow {
            tau: 2.0 * t,
            limit,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let taus: Vec<f64> = (0..n_samples).map(|_| t + t * rng.gen::<f64>()).collect();
    let points: Vec<Vec<f64>> = taus.iter().map(|&tau| torus_point(shifts, primes, tau)).collect();
    let discrepancy = box_discrepancy(&points, DEFAULT_BOXES, seed ^ 0x5bd1_e995)?;
    Ok(DiscrepancyReport {
        discrepancy,
        dimension: dim,
        samples: n_samples,
        boxes: DEFAULT_BOXES,
    })
}

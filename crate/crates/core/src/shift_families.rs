//! Shift functions of exponential type and their validation.
//!
//! A shift `γ: [t0, ∞) → [t1, ∞)` is accepted when it is a strictly
//! increasing C² bijection with monotone derivative and there is an
//! `α > 0` with `α·γ(T) ≤ γ'(T)` for `T ≥ t0` and `α·t0 ≤ log γ(t0)`.
//! Built-in families are evaluated in log-space so validation never
//! overflows; plain values are available through [`ShiftFunction::try_value`].

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ln(f64::MAX)`.
pub const LOG_F64_MAX: f64 = 709.782_712_893_384;

/// Relative tolerance for the inverse round trip.
pub const INVERSE_TOL: f64 = 1e-10;

/// Margins at or below this are inconclusive.
pub const MARGIN_TOL: f64 = 1e-9;

const EQUALITY_TOL: f64 = 1e-12;
const DIRECTION_SEED: u64 = 0x7a5c_0ff5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftFamily {
    /// `e^{aτ+b}`
    Exp,
    /// `τ^k e^{aτ}`
    MonomialExp,
}

impl std::str::FromStr for ShiftFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(ShiftFamily::Exp),
            "monomial-exp" => Ok(ShiftFamily::MonomialExp),
            other => Err(Error::InvalidParameter(format!(
                "unknown shift family `{other}` (expected `exp` or `monomial-exp`)"
            ))),
        }
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied shift given by callbacks.
#[derive(Clone)]
pub struct ShiftTable {
    pub name: String,
    pub value: RealFn,
    pub derivative: RealFn,
    pub second_derivative: RealFn,
    pub inverse: RealFn,
}

impl ShiftTable {
    pub fn new<V, D1, D2, I>(name: &str, value: V, derivative: D1, second: D2, inverse: I) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
        I: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.to_string(),
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            second_derivative: Arc::new(second),
            inverse: Arc::new(inverse),
        }
    }
}

impl fmt::Debug for ShiftTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShiftTable").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum ShiftKind {
    Exp { rate: f64, offset: f64 },
    MonomialExp { power: u32, rate: f64 },
    Table(ShiftTable),
}

/// A member of the shift class, immutable after construction.
#[derive(Debug, Clone)]
pub struct ShiftFunction {
    kind: ShiftKind,
    t0: f64,
    t1: f64,
    alpha: f64,
}

impl ShiftFunction {
    /// Builds a built-in family and computes the largest valid `α`.
    pub fn builtin(family: ShiftFamily, rate: f64, offset: f64, power: u32, t0: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
        }
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidParameter("offset must be finite".into()));
        }
        let kind = match family {
            ShiftFamily::Exp => {
                if power != 0 {
                    return Err(Error::InvalidParameter(
                        "power must be 0 for the `exp` family".into(),
                    ));
                }
                ShiftKind::Exp { rate, offset }
            }
            ShiftFamily::MonomialExp => {
                if offset != 0.0 {
                    return Err(Error::InvalidParameter(
                        "offset must be 0 for the `monomial-exp` family".into(),
                    ));
                }
                if power > 64 {
                    return Err(Error::InvalidParameter(format!("power {power} exceeds 64")));
                }
                ShiftKind::MonomialExp { power, rate }
            }
        };
        let mut f = ShiftFunction {
            kind,
            t0,
            t1: 0.0,
            alpha: rate,
        };
        let log_t1 = f.log_value(t0);
        if log_t1 <= 0.0 {
            return Err(Error::InadmissibleStart {
                t0,
                min_t0: f.inverse_log(0.0),
            });
        }
        // α ≤ inf γ'/γ = rate, and α·t0 ≤ log γ(t0).
        let exact_start = match f.kind {
            ShiftKind::Exp { offset, .. } => offset >= 0.0,
            ShiftKind::MonomialExp { .. } => t0 >= 1.0,
            ShiftKind::Table(_) => unreachable!(),
        };
        if !exact_start {
            f.alpha = rate.min(log_t1 / t0);
        }
        f.t1 = f.value(t0);
        Ok(f)
    }

    /// `e^{rate·τ}` starting at `t0`.
    pub fn exponential(rate: f64, t0: f64) -> Result<Self> {
        Self::builtin(ShiftFamily::Exp, rate, 0.0, 0, t0)
    }

    /// `τ^power · e^{rate·τ}` starting at `t0`.
    pub fn monomial_exp(power: u32, rate: f64, t0: f64) -> Result<Self> {
        Self::builtin(ShiftFamily::MonomialExp, rate, 0.0, power, t0)
    }

    /// Wraps user callbacks with a caller-chosen `α`; nothing is validated here.
    pub fn from_table(table: ShiftTable, t0: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("t0 must be finite".into()));
        }
        let t1 = (table.value)(t0);
        Ok(ShiftFunction {
            kind: ShiftKind::Table(table),
            t0,
            t1,
            alpha,
        })
    }

    pub fn kind(&self) -> &ShiftKind {
        &self.kind
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn t1(&self) -> f64 {
        self.t1
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn name(&self) -> String {
        match &self.kind {
            ShiftKind::Exp { rate, offset } => format!("exp(rate={rate}, offset={offset})"),
            ShiftKind::MonomialExp { power, rate } => {
                format!("monomial-exp(power={power}, rate={rate})")
            }
            ShiftKind::Table(t) => t.name.clone(),
        }
    }

    /// `(rate, offset)` for pure exponentials.
    pub fn pure_exponential(&self) -> Option<(f64, f64)> {
        match self.kind {
            ShiftKind::Exp { rate, offset } => Some((rate, offset)),
            ShiftKind::MonomialExp { power: 0, rate } => Some((rate, 0.0)),
            _ => None,
        }
    }

    pub fn log_value(&self, tau: f64) -> f64 {
        match &self.kind {
            ShiftKind::Exp { rate, offset } => rate * tau + offset,
            ShiftKind::MonomialExp { power, rate } => {
                if *power == 0 {
                    rate * tau
                } else {
                    *power as f64 * tau.ln() + rate * tau
                }
            }
            ShiftKind::Table(t) => (t.value)(tau).ln(),
        }
    }

    /// `γ(τ)`; may be `inf` past the representable range.
    pub fn value(&self, tau: f64) -> f64 {
        match &self.kind {
            ShiftKind::Table(t) => (t.value)(tau),
            _ => self.log_value(tau).exp(),
        }
    }

    /// `γ(τ)`, failing loudly when it is not representable.
    pub fn try_value(&self, tau: f64) -> Result<f64> {
        let v = self.value(tau);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow {
                tau,
                limit: self.overflow_limit(),
            })
        }
    }

    /// `log γ'(τ)`.
    pub fn log_derivative(&self, tau: f64) -> f64 {
        match &self.kind {
            ShiftKind::Exp { rate, offset } => rate.ln() + rate * tau + offset,
            ShiftKind::MonomialExp { power, rate } => {
                let k = *power as f64;
                if *power == 0 {
                    rate.ln() + rate * tau
                } else {
                    (k - 1.0) * tau.ln() + rate * tau + (k + rate * tau).ln()
                }
            }
            ShiftKind::Table(t) => (t.derivative)(tau).ln(),
        }
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        match &self.kind {
            ShiftKind::Table(t) => (t.derivative)(tau),
            _ => self.log_derivative(tau).exp(),
        }
    }

    pub fn second_derivative(&self, tau: f64) -> f64 {
        match &self.kind {
            ShiftKind::Table(t) => (t.second_derivative)(tau),
            _ => self.value(tau) * self.curvature_ratio(tau),
        }
    }

    /// `γ'(τ)/γ(τ)`.
    pub fn growth_ratio(&self, tau: f64) -> f64 {
        match &self.kind {
            ShiftKind::Exp { rate, .. } => *rate,
            ShiftKind::MonomialExp { power, rate } => rate + *power as f64 / tau,
            ShiftKind::Table(t) => (t.derivative)(tau) / (t.value)(tau),
        }
    }

    /// `γ''(τ)/γ(τ)`; its sign is the sign of `γ''`.
    pub fn curvature_ratio(&self, tau: f64) -> f64 {
        match &self.kind {
            ShiftKind::Exp { rate, .. } => rate * rate,
            ShiftKind::MonomialExp { power, rate } => {
                let k = *power as f64;
                rate * rate + 2.0 * rate * k / tau + k * (k - 1.0) / (tau * tau)
            }
            ShiftKind::Table(t) => (t.second_derivative)(tau) / (t.value)(tau),
        }
    }

    /// `γ⁻¹(e^{log_y})`.
    pub fn inverse_log(&self, log_y: f64) -> f64 {
        match &self.kind {
            ShiftKind::Exp { rate, offset } => (log_y - offset) / rate,
            ShiftKind::MonomialExp { power, rate } => solve_monomial_exp(*power, *rate, log_y),
            ShiftKind::Table(t) => (t.inverse)(log_y.exp()),
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        match &self.kind {
            ShiftKind::Table(t) => (t.inverse)(y),
            _ => self.inverse_log(y.ln()),
        }
    }

    /// `(γ⁻¹)'(y) = 1/γ'(γ⁻¹(y))`.
    pub fn inverse_derivative(&self, y: f64) -> f64 {
        1.0 / self.derivative(self.inverse(y))
    }

    /// Largest `τ` with `γ(τ)` representable; `inf` when unknown.
    pub fn overflow_limit(&self) -> f64 {
        match &self.kind {
            ShiftKind::Table(_) => f64::INFINITY,
            _ => self.inverse_log(LOG_F64_MAX),
        }
    }

    /// Largest `α` verifiable on the grid: `min(min γ'/γ, log γ(t0)/t0)`.
    pub fn largest_alpha(&self, grid: &TauGrid) -> f64 {
        grid.points()
            .map(|tau| self.growth_ratio(tau))
            .fold(self.log_value(self.t0) / self.t0, f64::min)
    }
}

/// Solves `a·τ + k·ln τ = log_y` for `τ > 0` with safeguarded Newton.
fn solve_monomial_exp(power: u32, rate: f64, log_y: f64) -> f64 {
    if power == 0 {
        return log_y / rate;
    }
    let k = power as f64;
    let g = |tau: f64| rate * tau + k * tau.ln() - log_y;
    let mut hi = (log_y / rate).max(1.0);
    let mut lo = hi * 0.5;
    while g(lo) > 0.0 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return lo;
        }
    }
    let mut x = hi;
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - gx / (rate + k / x);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * x.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Uniform sampling grid on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl TauGrid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points }
    }

    /// `[t0, t0 + span]`.
    pub fn from_start(t0: f64, span: f64, points: usize) -> Self {
        Self::new(t0, t0 + span, points)
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.point(i))
    }
}

/// Outcome of one checked condition. `pass` is equivalent to `margin ≥ 0`
/// after tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: String,
    pub pass: bool,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<f64>,
}

impl ConditionResult {
    fn new(condition: &str, pass: bool, margin: f64, witness: Option<f64>) -> Self {
        Self {
            condition: condition.to_string(),
            pass,
            margin,
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub family: String,
    pub alpha: f64,
    pub t0: f64,
    pub t1: f64,
    pub usable_lo: f64,
    pub usable_hi: f64,
    pub truncated: bool,
    pub pass: bool,
    pub conditions: Vec<ConditionResult>,
}

impl ValidationReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.condition == name)
    }
}

/// Grid points where `γ` is representable; the bool flags truncation.
fn usable_points(f: &ShiftFunction, grid: &TauGrid) -> (Vec<f64>, bool) {
    let mut pts = Vec::with_capacity(grid.points);
    for tau in grid.points() {
        if !f.value(tau).is_finite() || !f.derivative(tau).is_finite() {
            return (pts, true);
        }
        pts.push(tau);
    }
    (pts, false)
}

/// Checks (F1)–(F3) on a grid covering `[t0, t0 + span]`.
pub fn validate_f_membership(f: &ShiftFunction, grid: &TauGrid) -> Result<ValidationReport> {
    if grid.points < 1000 {
        return Err(Error::InvalidParameter(format!(
            "validation grid needs at least 1000 points, got {}",
            grid.points
        )));
    }
    if !(grid.hi > grid.lo) || grid.lo < f.t0 - 1e-12 * f.t0.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "grid [{}, {}] must start at t0 = {} and have positive span",
            grid.lo, grid.hi, f.t0
        )));
    }
    let (pts, truncated) = usable_points(f, grid);
    if pts.len() < 2 {
        return Err(Error::Overflow {
            tau: grid.lo,
            limit: f.overflow_limit(),
        });
    }
    let alpha = f.alpha;
    let mut conditions = Vec::new();

    // (F1) strictly increasing, positive endpoints, γ(t0) = t1.
    let logs: Vec<f64> = pts.iter().map(|&t| f.log_value(t)).collect();
    let mut inc_margin = f64::INFINITY;
    let mut inc_witness = None;
    for (i, w) in logs.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d < inc_margin {
            inc_margin = d;
        }
        if !(d > 0.0) && inc_witness.is_none() {
            inc_witness = Some(pts[i + 1]);
        }
    }
    let start_ok = f.t0 > 0.0
        && f.t1 > 0.0
        && ((f.value(f.t0) - f.t1) / f.t1).abs() <= EQUALITY_TOL;
    if !start_ok && inc_witness.is_none() {
        inc_witness = Some(f.t0);
    }
    conditions.push(ConditionResult::new(
        "F1",
        inc_witness.is_none(),
        if start_ok { inc_margin } else { -1.0 },
        inc_witness,
    ));

    // (F1) bijection: inverse round trips in both directions.
    let mut worst = 0.0f64;
    let mut inv_witness = None;
    for (&x, &ly) in pts.iter().zip(&logs) {
        let back = match f.kind {
            ShiftKind::Table(_) => f.inverse(f.value(x)),
            _ => f.inverse_log(ly),
        };
        let ex = (back - x).abs() / x.abs().max(f64::MIN_POSITIVE);
        let y_back = f.log_value(f.inverse_log(ly));
        let ey = (y_back - ly).abs();
        let e = ex.max(ey);
        if !(e <= INVERSE_TOL) && inv_witness.is_none() {
            inv_witness = Some(x);
        }
        if e > worst || e.is_nan() {
            worst = e;
        }
    }
    conditions.push(ConditionResult::new(
        "F1-inverse",
        inv_witness.is_none(),
        INVERSE_TOL - worst,
        inv_witness,
    ));

    // (F2) γ' monotone: γ'' has constant sign.
    let curv: Vec<f64> = pts.iter().map(|&t| f.curvature_ratio(t)).collect();
    let sign = curv.iter().find(|c| **c != 0.0).map(|c| c.signum()).unwrap_or(1.0);
    let mut f2_margin = f64::INFINITY;
    let mut f2_witness = None;
    for (&t, &c) in pts.iter().zip(&curv) {
        let m = sign * c;
        f2_margin = f2_margin.min(m);
        if !(m >= 0.0) && f2_witness.is_none() {
            f2_witness = Some(t);
        }
    }
    conditions.push(ConditionResult::new(
        "F2",
        f2_witness.is_none(),
        f2_margin,
        f2_witness,
    ));

    // (F3)(a) α·γ ≤ γ'.
    let tol = EQUALITY_TOL * alpha;
    let mut f3a_margin = f64::INFINITY;
    let mut f3a_witness = None;
    for &t in &pts {
        let m = f.growth_ratio(t) - alpha;
        f3a_margin = f3a_margin.min(m);
        if !(m >= -tol) && f3a_witness.is_none() {
            f3a_witness = Some(t);
        }
    }
    conditions.push(ConditionResult::new(
        "F3a",
        f3a_witness.is_none(),
        f3a_margin,
        f3a_witness,
    ));

    // (F3)(b) α·t0 ≤ log γ(t0).
    let f3b_margin = f.log_value(f.t0) - alpha * f.t0;
    let f3b_pass = f3b_margin >= -EQUALITY_TOL * (alpha * f.t0).abs().max(1.0);
    conditions.push(ConditionResult::new(
        "F3b",
        f3b_pass,
        f3b_margin,
        (!f3b_pass).then_some(f.t0),
    ));

    let pass = conditions.iter().all(|c| c.pass);
    Ok(ValidationReport {
        family: f.name(),
        alpha,
        t0: f.t0,
        t1: f.t1,
        usable_lo: pts[0],
        usable_hi: *pts.last().unwrap(),
        truncated,
        pass,
        conditions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub family: String,
    pub alpha: f64,
    pub c: f64,
    pub pass: bool,
    pub conditions: Vec<ConditionResult>,
    /// `(T, log(γ(cT) − γ(T)))` along the doubling sequence.
    pub growth_sequence: Vec<(f64, f64)>,
}

impl PropertyReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.condition == name)
    }
}

/// Checks the growth consequences of class membership:
/// `e^{αx} ≤ γ(x)`, `(γ⁻¹)'(y) ≤ 1/(αy)` and unbounded growth of `γ(cT) − γ(T)`.
pub fn check_growth_properties(f: &ShiftFunction, grid: &TauGrid, c: f64) -> Result<PropertyReport> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c must exceed 1, got {c}")));
    }
    if grid.points < 2 || !(grid.hi > grid.lo) {
        return Err(Error::InvalidParameter("degenerate grid".into()));
    }
    let (pts, _) = usable_points(f, grid);
    if pts.len() < 2 {
        return Err(Error::Overflow {
            tau: grid.lo,
            limit: f.overflow_limit(),
        });
    }
    let alpha = f.alpha;
    let mut conditions = Vec::new();

    let mut lb_margin = f64::INFINITY;
    let mut lb_witness = None;
    for &x in &pts {
        let m = f.log_value(x) - alpha * x;
        lb_margin = lb_margin.min(m);
        if !(m >= -EQUALITY_TOL * (alpha * x).abs().max(1.0)) && lb_witness.is_none() {
            lb_witness = Some(x);
        }
    }
    conditions.push(ConditionResult::new(
        "exp-lower-bound",
        lb_witness.is_none(),
        lb_margin,
        lb_witness,
    ));

    // y runs geometrically over [γ(lo), γ(hi)] of the usable range.
    let ly_lo = f.log_value(pts[0]);
    let ly_hi = f.log_value(*pts.last().unwrap());
    let n = grid.points;
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut inv_witness = None;
    for i in 0..n {
        let ly = ly_lo + (ly_hi - ly_lo) * i as f64 / (n - 1) as f64;
        let ratio = match f.kind {
            ShiftKind::Table(_) => {
                let y = ly.exp();
                alpha * y * f.inverse_derivative(y)
            }
            _ => (alpha.ln() + ly - f.log_derivative(f.inverse_log(ly))).exp(),
        };
        worst_ratio = worst_ratio.max(ratio);
        if !(ratio <= 1.0 + EQUALITY_TOL) && inv_witness.is_none() {
            inv_witness = Some(ly.exp());
        }
    }
    conditions.push(ConditionResult::new(
        "inverse-derivative",
        inv_witness.is_none(),
        1.0 - worst_ratio,
        inv_witness,
    ));

    let usable_hi = *pts.last().unwrap();
    let mut growth_sequence = Vec::new();
    let mut big_t = pts[0].max(f.t0);
    while c * big_t <= usable_hi {
        let lo = f.log_value(big_t);
        let hi = f.log_value(c * big_t);
        growth_sequence.push((big_t, lo + (hi - lo).exp_m1().ln()));
        big_t *= 2.0;
    }
    let mut gd_margin = f64::INFINITY;
    let mut gd_witness = None;
    for w in growth_sequence.windows(2) {
        let d = w[1].1 - w[0].1;
        gd_margin = gd_margin.min(d);
        if !(d > 0.0) && gd_witness.is_none() {
            gd_witness = Some(w[1].0);
        }
    }
    let enough = growth_sequence.len() >= 2;
    conditions.push(ConditionResult::new(
        "growth-difference",
        enough && gd_witness.is_none(),
        if enough { gd_margin } else { -1.0 },
        gd_witness,
    ));

    Ok(PropertyReport {
        family: f.name(),
        alpha,
        c,
        pass: conditions.iter().all(|c| c.pass),
        conditions,
        growth_sequence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AdmissibleCertified,
    AdmissibleSampled,
    Undetermined,
    NotAdmissible,
}

impl Verdict {
    pub fn is_admissible(self) -> bool {
        matches!(self, Verdict::AdmissibleCertified | Verdict::AdmissibleSampled)
    }
}

/// Sampled evidence for admissibility of a tuple.
///
/// Positive rescaling of a coefficient vector rescales the margin, so
/// unit-norm directions cover every nonzero vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityEvidence {
    pub directions: usize,
    pub horizon: f64,
    pub min_margin: f64,
    pub monotone_fraction: f64,
    pub analytic_certificate: bool,
    pub verdict: Verdict,
    pub worst_direction: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_tau: Option<f64>,
}

/// Ordered family of validated shifts.
#[derive(Debug, Clone)]
pub struct ShiftTuple {
    members: Vec<ShiftFunction>,
    evidence: Option<AdmissibilityEvidence>,
}

impl ShiftTuple {
    /// Validates every member on `[t0, t0 + 20]` (clipped at overflow).
    pub fn new(members: Vec<ShiftFunction>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("a shift tuple needs r ≥ 1".into()));
        }
        for (j, m) in members.iter().enumerate() {
            let grid = TauGrid::from_start(m.t0, 20.0, 1000);
            let report = validate_f_membership(m, &grid)?;
            if !report.pass {
                let failed: Vec<&str> = report
                    .conditions
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.condition.as_str())
                    .collect();
                return Err(Error::Precondition(format!(
                    "member {j} ({}) fails {}",
                    m.name(),
                    failed.join(", ")
                )));
            }
        }
        Ok(Self {
            members,
            evidence: None,
        })
    }

    pub fn single(member: ShiftFunction) -> Result<Self> {
        Self::new(vec![member])
    }

    pub fn members(&self) -> &[ShiftFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn evidence(&self) -> Option<&AdmissibilityEvidence> {
        self.evidence.as_ref()
    }

    pub fn with_evidence(mut self, evidence: AdmissibilityEvidence) -> Self {
        self.evidence = Some(evidence);
        self
    }

    /// Pure exponentials with pairwise-distinct rates: the fastest term with
    /// a nonzero coefficient dominates, so every combination of derivatives
    /// is eventually monotone and unbounded.
    pub fn has_analytic_certificate(&self) -> bool {
        let rates: Option<Vec<f64>> = self
            .members
            .iter()
            .map(|m| m.pure_exponential().map(|(a, _)| a))
            .collect();
        match rates {
            Some(r) => r.iter().enumerate().all(|(i, a)| {
                r[i + 1..]
                    .iter()
                    .all(|b| (a - b).abs() > 1e-12 * a.abs().max(b.abs()))
            }),
            None => false,
        }
    }
}

/// Behaviour of `Σ c_j γ'_j(τ)` beyond a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionOutcome {
    pub monotone: bool,
    /// `min |Σ c_j γ'_j|`, or 0 when the combination changes sign.
    pub margin: f64,
    /// The combination vanishes (to rounding) at every evaluated point.
    pub cancelled: bool,
    pub witness: Option<f64>,
    pub points_used: usize,
}

/// Evaluates one coefficient direction on `{horizon} ∪ {grid points > horizon}`.
///
/// For a fixed grid, lowering the horizon only adds points, so a failure at
/// one horizon persists at every smaller one.
pub fn direction_outcome(
    members: &[ShiftFunction],
    c: &[f64],
    horizon: f64,
    grid: &TauGrid,
) -> Result<DirectionOutcome> {
    if c.len() != members.len() {
        return Err(Error::LengthMismatch {
            left: c.len(),
            right: members.len(),
        });
    }
    let mut taus = vec![horizon];
    taus.extend(grid.points().filter(|&t| t > horizon));
    let mut values = Vec::with_capacity(taus.len());
    let mut cancelled = true;
    for &tau in &taus {
        let mut s = 0.0;
        let mut scale = 0.0;
        let mut finite = true;
        for (m, &cj) in members.iter().zip(c) {
            let d = m.derivative(tau);
            if !d.is_finite() {
                finite = false;
                break;
            }
            s += cj * d;
            scale += (cj * d).abs();
        }
        if !finite {
            break;
        }
        if s.abs() > 1e-12 * scale {
            cancelled = false;
        }
        values.push((tau, s));
    }
    if values.is_empty() {
        return Err(Error::Overflow {
            tau: horizon,
            limit: members
                .iter()
                .map(|m| m.overflow_limit())
                .fold(f64::INFINITY, f64::min),
        });
    }
    let mut increasing = true;
    let mut decreasing = true;
    let mut witness = None;
    for w in values.windows(2) {
        let d = w[1].1 - w[0].1;
        if d < 0.0 {
            increasing = false;
        }
        if d > 0.0 {
            decreasing = false;
        }
        if !increasing && !decreasing && witness.is_none() {
            witness = Some(w[1].0);
        }
    }
    let has_pos = values.iter().any(|v| v.1 > 0.0);
    let has_neg = values.iter().any(|v| v.1 < 0.0);
    let (margin, margin_tau) = if has_pos && has_neg {
        let crossing = values
            .windows(2)
            .find(|w| w[0].1.signum() != w[1].1.signum())
            .map(|w| w[1].0);
        (0.0, crossing)
    } else {
        values
            .iter()
            .map(|&(t, s)| (s.abs(), Some(t)))
            .fold((f64::INFINITY, None), |acc, v| if v.0 < acc.0 { v } else { acc })
    };
    Ok(DirectionOutcome {
        monotone: increasing || decreasing,
        margin,
        cancelled,
        witness: witness.or(if cancelled { Some(horizon) } else { margin_tau }),
        points_used: values.len(),
    })
}

/// Deterministic unit directions: coordinate axes and pairwise diagonals
/// first, then seeded Gaussian directions normalised to the sphere.
pub fn sample_directions(r: usize, n: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    if r == 1 {
        for i in 0..n.max(2) {
            dirs.push(vec![if i % 2 == 0 { 1.0 } else { -1.0 }]);
        }
        return dirs;
    }
    for i in 0..r {
        for sign in [1.0, -1.0] {
            let mut v = vec![0.0; r];
            v[i] = sign;
            dirs.push(v);
        }
    }
    for i in 0..r {
        for j in i + 1..r {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut v = vec![0.0; r];
                v[i] = si * FRAC_1_SQRT_2;
                v[j] = sj * FRAC_1_SQRT_2;
                dirs.push(v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DIRECTION_SEED);
    while dirs.len() < n {
        let v: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            dirs.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    dirs
}

/// Samples unit directions and certifies admissibility where possible.
pub fn check_admissibility(
    tuple: &ShiftTuple,
    n_directions: usize,
    horizon: f64,
    grid: &TauGrid,
) -> Result<AdmissibilityEvidence> {
    if n_directions < 64 {
        return Err(Error::InvalidParameter(format!(
            "need at least 64 directions, got {n_directions}"
        )));
    }
    if !horizon.is_finite() {
        return Err(Error::InvalidParameter("horizon must be finite".into()));
    }
    let dirs = sample_directions(tuple.len(), n_directions);
    let mut min_margin = f64::INFINITY;
    let mut monotone = 0usize;
    let mut worst: Option<(Vec<f64>, DirectionOutcome)> = None;
    let mut cancelled: Option<(Vec<f64>, DirectionOutcome)> = None;
    for c in &dirs {
        let out = direction_outcome(tuple.members(), c, horizon, grid)?;
        if out.monotone {
            monotone += 1;
        }
        if out.cancelled && cancelled.is_none() {
            cancelled = Some((c.clone(), out.clone()));
        }
        if out.margin < min_margin || worst.is_none() {
            min_margin = out.margin;
            worst = Some((c.clone(), out));
        }
    }
    let monotone_fraction = monotone as f64 / dirs.len() as f64;
    let certificate = tuple.has_analytic_certificate();
    let sampled_ok = min_margin > MARGIN_TOL && monotone == dirs.len();
    let verdict = if cancelled.is_some() {
        Verdict::NotAdmissible
    } else if !sampled_ok {
        Verdict::Undetermined
    } else if certificate {
        Verdict::AdmissibleCertified
    } else {
        Verdict::AdmissibleSampled
    };
    let (worst_direction, outcome) = cancelled.or(worst).expect("at least one direction");
    Ok(AdmissibilityEvidence {
        directions: dirs.len(),
        horizon,
        min_margin: min_margin.max(0.0),
        monotone_fraction,
        analytic_certificate: certificate,
        verdict,
        worst_direction,
        witness_tau: outcome.witness,
    })
}

/// Doubles the horizon while the verdict stays undetermined.
pub fn check_admissibility_doubling(
    tuple: &ShiftTuple,
    n_directions: usize,
    start_horizon: f64,
    max_doublings: usize,
    grid: &TauGrid,
) -> Result<AdmissibilityEvidence> {
    let mut horizon = start_horizon;
    let mut ev = check_admissibility(tuple, n_directions, horizon, grid)?;
    for _ in 0..max_doublings {
        if ev.verdict != Verdict::Undetermined {
            break;
        }
        horizon *= 2.0;
        if horizon > grid.hi {
            break;
        }
        ev = check_admissibility(tuple, n_directions, horizon, grid)?;
    }
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_table() -> ShiftFunction {
        let t = ShiftTable::new("tau^2", |x| x * x, |x| 2.0 * x, |_| 2.0, |y: f64| y.sqrt());
        ShiftFunction::from_table(t, 2.0, 0.1).unwrap()
    }

    fn log_table() -> ShiftFunction {
        let t = ShiftTable::new(
            "log",
            |x: f64| x.ln(),
            |x| 1.0 / x,
            |x| -1.0 / (x * x),
            |y: f64| y.exp(),
        );
        ShiftFunction::from_table(t, 3.0, 0.1).unwrap()
    }

    #[test]
    fn exp_unit_rate() {
        let f = ShiftFunction::exponential(1.0, 1.0).unwrap();
        assert_eq!(f.alpha(), 1.0);
        assert!((f.t1() - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(f.growth_ratio(5.0), f.alpha());
    }

    #[test]
    fn exp_half_rate_boundary() {
        let f = ShiftFunction::exponential(0.5, 2.0).unwrap();
        assert_eq!(f.alpha(), 0.5);
        assert_eq!(f.log_value(2.0) - f.alpha() * 2.0, 0.0);
    }

    #[test]
    fn monomial_exp_accepted() {
        let f = ShiftFunction::monomial_exp(1, 1.0, 2.0).unwrap();
        assert_eq!(f.alpha(), 1.0);
        assert!((f.derivative(3.0) - 4.0 * 3f64.exp()).abs() < 1e-12 * f.derivative(3.0));
    }

    #[test]
    fn negative_offset_reports_start() {
        let err = ShiftFunction::builtin(ShiftFamily::Exp, 1.0, -2.0, 0, 1.5).unwrap_err();
        match err {
            Error::InadmissibleStart { min_t0, .. } => assert!((min_t0 - 2.0).abs() < 1e-15),
            e => panic!("unexpected {e:?}"),
        }
        let ok = ShiftFunction::builtin(ShiftFamily::Exp, 1.0, -2.0, 0, 4.0).unwrap();
        assert!((ok.alpha() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monomial_below_one_lowers_alpha() {
        let f = ShiftFunction::monomial_exp(1, 1.0, 0.8).unwrap();
        assert!((f.alpha() - (1.0 + 0.8f64.ln() / 0.8)).abs() < 1e-15);
        assert!(ShiftFunction::monomial_exp(1, 1.0, 0.5).is_err());
        assert!(ShiftFunction::monomial_exp(2, 0.1, 0.2).is_err());
    }

    #[test]
    fn monomial_inverse_roundtrip() {
        let f = ShiftFunction::monomial_exp(3, 0.7, 1.0).unwrap();
        for &x in &[1.0, 2.5, 10.0, 300.0, 900.0] {
            let back = f.inverse_log(f.log_value(x));
            assert!((back - x).abs() <= 1e-13 * x, "{x} -> {back}");
        }
    }

    #[test]
    fn validate_exp_equality_case() {
        let f = ShiftFunction::exponential(1.0, 1.0).unwrap();
        let r = validate_f_membership(&f, &TauGrid::new(1.0, 20.0, 1000)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.condition("F3a").unwrap().margin, 0.0);
        assert!(!r.truncated);
    }

    #[test]
    fn validate_square_fails_f3a() {
        let f = square_table();
        let r = validate_f_membership(&f, &TauGrid::new(2.0, 100.0, 1000)).unwrap();
        assert!(!r.pass);
        let f3a = r.condition("F3a").unwrap();
        assert!(!f3a.pass);
        let w = f3a.witness.unwrap();
        // 2τ < 0.1τ² first holds just past τ = 20.
        assert!(w > 20.0 && w < 20.2, "witness {w}");
        assert!(r.condition("F2").unwrap().pass);
    }

    #[test]
    fn validate_log_fails_f3() {
        let f = log_table();
        let r = validate_f_membership(&f, &TauGrid::new(3.0, 100.0, 1000)).unwrap();
        assert!(!r.condition("F3a").unwrap().pass);
        assert!(!r.condition("F3b").unwrap().pass);
        assert_eq!(r.condition("F3b").unwrap().witness, Some(3.0));
    }

    #[test]
    fn validate_truncates_at_overflow() {
        let f = ShiftFunction::exponential(2.0, 1.0).unwrap();
        let r = validate_f_membership(&f, &TauGrid::new(1.0, 600.0, 2000)).unwrap();
        assert!(r.truncated);
        assert!(r.usable_hi <= f.overflow_limit());
        assert!(r.usable_hi > 350.0);
        assert!(r.pass);
    }

    #[test]
    fn validate_rejects_short_grid() {
        let f = ShiftFunction::exponential(1.0, 1.0).unwrap();
        assert!(validate_f_membership(&f, &TauGrid::new(1.0, 20.0, 10)).is_err());
    }

    #[test]
    fn growth_exp_equalities() {
        let f = ShiftFunction::exponential(1.0, 1.0).unwrap();
        let r = check_growth_properties(&f, &TauGrid::new(1.0, 20.0, 1000), 2.0).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.condition("inverse-derivative").unwrap().margin.abs() <= 1e-12);
        let ts: Vec<f64> = r.growth_sequence.iter().map(|p| p.0).collect();
        assert_eq!(ts, vec![1.0, 2.0, 4.0, 8.0]);
    }

    #[test]
    fn growth_monomial_lower_bound() {
        let f = ShiftFunction::monomial_exp(1, 1.0, 2.0).unwrap();
        let r = check_growth_properties(&f, &TauGrid::new(2.0, 20.0, 1000), 2.0).unwrap();
        assert!(r.pass);
        assert!(r.condition("exp-lower-bound").unwrap().margin >= 2f64.ln() - 1e-12);
    }

    #[test]
    fn single_exp_admissible() {
        let t = ShiftTuple::single(ShiftFunction::exponential(1.0, 1.0).unwrap()).unwrap();
        let grid = TauGrid::new(1.0, 30.0, 1000);
        let ev = check_admissibility(&t, 64, 5.0, &grid).unwrap();
        assert!(ev.verdict.is_admissible());
        assert!((ev.min_margin - 5f64.exp()).abs() < 1e-9);
        assert!(ev.analytic_certificate);
    }

    #[test]
    fn equal_rates_cancel() {
        let e = ShiftFunction::exponential(1.0, 1.0).unwrap();
        let t = ShiftTuple::new(vec![e.clone(), e]).unwrap();
        let out = direction_outcome(
            t.members(),
            &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            10.0,
            &TauGrid::new(1.0, 30.0, 1000),
        )
        .unwrap();
        assert!(out.cancelled);
        assert_eq!(out.margin, 0.0);
        let ev = check_admissibility(&t, 64, 10.0, &TauGrid::new(1.0, 30.0, 1000)).unwrap();
        assert_eq!(ev.verdict, Verdict::NotAdmissible);
        assert!(!ev.analytic_certificate);
        assert!(ev.min_margin < MARGIN_TOL);
    }

    #[test]
    fn directions_are_unit() {
        for d in sample_directions(3, 100) {
            let n: f64 = d.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert_eq!(sample_directions(3, 100), sample_directions(3, 100));
    }

    #[test]
    fn tuple_rejects_counterexample() {
        assert!(ShiftTuple::single(square_table()).is_err());
    }
}

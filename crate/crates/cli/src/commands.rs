//! Subcommand bodies: config in, report and data tables out.

use serde::Serialize;
use zsl_core::equidistribution_bench::{
    oscillatory_bound_check, torus_discrepancy, weighted_mean_square_ratio, weighted_mean_square_ratio_t_domain,
    CoefficientSpec, DiscrepancyReport, IndexTuple, MeanValueReport, OscillatoryReport, WeylReport,
};
use zsl_core::quadrature::QuadratureSpec;
use zsl_core::shift_families::{
    check_admissibility_doubling, check_growth_properties, validate_f_membership, PropertyReport, ShiftFamily,
    ShiftTable, ValidationReport,
};
use zsl_core::universality_lab::{
    density_estimate, random_model_compare, truncation_discrepancy, AfeEvaluator, Functional, Sampling, Target,
};
use zsl_core::zeta_eval::{zeta_afe, zeta_em, zeta_smoothed};
use zsl_core::{
    AdmissibilityEvidence, AfeParams, CompactSetSpec, Complex64, ComplexPoint, ExperimentConfig, Parallelism,
    ShiftFunction, ShiftTuple, TauGrid,
};

use crate::config::Config;
use crate::output::{num, plot_table, PlotSource, Table};
use crate::{CliError, Subcommand};

const DEFAULT_SPAN: f64 = 29.0;

type RealFn = Box<dyn Fn(f64) -> f64>;
const DEFAULT_GRID_POINTS: usize = 1000;

/// What a subcommand produced.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    /// A check ran and reported failure.
    pub failed: bool,
    pub report: String,
    /// Per-sample rows.
    pub data: Option<Table>,
    pub plot: Option<Table>,
}

fn report<T: Serialize>(value: &T) -> String {
    toml::to_string(value).expect("report serialises")
}

fn need<T: Clone>(v: &Option<T>, key: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
}

/// Value `i` of a per-shift list, broadcasting a single entry.
fn pick<T: Copy>(v: &Option<Vec<T>>, key: &str, i: usize, n: usize, default: T) -> Result<T, CliError> {
    match v {
        None => Ok(default),
        Some(list) if list.len() == 1 => Ok(list[0]),
        Some(list) if list.len() == n => Ok(list[i]),
        Some(list) => Err(CliError::Config(format!(
            "`{key}` has {} entries; expected 1 or {n}",
            list.len()
        ))),
    }
}

fn single(v: &Option<Vec<f64>>, key: &str) -> Result<f64, CliError> {
    match v.as_deref() {
        Some([x]) => Ok(*x),
        Some(_) => Err(CliError::Config(format!("`{key}` must be a single value here"))),
        None => Err(CliError::Config(format!("missing required key `{key}`"))),
    }
}

fn pair<T: Copy>(v: &Option<Vec<T>>, key: &str) -> Result<(T, T), CliError> {
    match v.as_deref() {
        Some([a, b]) => Ok((*a, *b)),
        Some(_) => Err(CliError::Config(format!("`{key}` must have exactly two entries"))),
        None => Err(CliError::Config(format!("missing required key `{key}`"))),
    }
}

fn table_shift(name: &str, power: u32, t0: f64, alpha: f64) -> Result<ShiftFunction, CliError> {
    let table = match name {
        "power" => {
            let k = power as i32;
            let kf = power as f64;
            ShiftTable::new(
                &format!("tau^{power}"),
                move |x: f64| x.powi(k),
                move |x: f64| kf * x.powi(k - 1),
                move |x: f64| kf * (kf - 1.0) * x.powi(k - 2),
                move |y: f64| y.powf(1.0 / kf),
            )
        }
        _ => ShiftTable::new("log", |x: f64| x.ln(), |x| 1.0 / x, |x| -1.0 / (x * x), |y: f64| y.exp()),
    };
    Ok(ShiftFunction::from_table(table, t0, alpha)?)
}

/// Shift functions described by the `family`, `rate`, … keys.
pub fn build_shifts(cfg: &Config) -> Result<Vec<ShiftFunction>, CliError> {
    let families = need(&cfg.family, "family")?;
    let n = families.len();
    if n == 0 {
        return Err(CliError::Config("`family` is empty".into()));
    }
    let mut out = Vec::with_capacity(n);
    for (i, name) in families.iter().enumerate() {
        let rate = pick(&cfg.rate, "rate", i, n, 1.0)?;
        let offset = pick(&cfg.offset, "offset", i, n, 0.0)?;
        let t0 = pick(&cfg.t0, "t0", i, n, 1.0)?;
        let alpha = pick(&cfg.alpha, "alpha", i, n, 0.1)?;
        let f = match name.as_str() {
            "power" => table_shift(name, pick(&cfg.power, "power", i, n, 2)?, t0, alpha)?,
            "log" => table_shift(name, 0, t0, alpha)?,
            other => {
                let family: ShiftFamily = other
                    .parse()
                    .map_err(|_| CliError::Config(format!("unknown family `{other}`")))?;
                let default_power = u32::from(family == ShiftFamily::MonomialExp);
                let power = pick(&cfg.power, "power", i, n, default_power)?;
                ShiftFunction::builtin(family, rate, offset, power, t0)?
            }
        };
        out.push(f);
    }
    Ok(out)
}

fn quadrature(cfg: &Config) -> Result<QuadratureSpec, CliError> {
    let d = QuadratureSpec::default();
    let q = QuadratureSpec {
        max_phase: cfg.max_phase.unwrap_or(d.max_phase),
        abs_tol: cfg.abs_tol.unwrap_or(d.abs_tol),
        max_panels: cfg.max_panels.unwrap_or(d.max_panels),
    };
    q.validate()?;
    Ok(q)
}

#[derive(Serialize)]
struct FamilyEntry {
    validation: ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    growth: Option<PropertyReport>,
}

#[derive(Serialize)]
struct FamilyReport {
    pass: bool,
    shift: Vec<FamilyEntry>,
}

fn validate_family(cfg: &Config) -> Result<CommandOutput, CliError> {
    let span = cfg.span.unwrap_or(DEFAULT_SPAN);
    let points = cfg.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    let c = cfg.growth_c.unwrap_or(2.0);
    let mut entries = Vec::new();
    for f in build_shifts(cfg)? {
        let grid = TauGrid::from_start(f.t0(), span, points);
        let validation = validate_f_membership(&f, &grid)?;
        let growth = if validation.pass {
            Some(check_growth_properties(&f, &grid, c)?)
        } else {
            None
        };
        entries.push(FamilyEntry { validation, growth });
    }
    let pass = entries
        .iter()
        .all(|e| e.validation.pass && e.growth.as_ref().is_none_or(|g| g.pass));
    let mut data = Table::new(["shift", "condition", "pass", "margin", "witness"]);
    for (i, e) in entries.iter().enumerate() {
        let growth = e.growth.iter().flat_map(|g| g.conditions.iter());
        for c in e.validation.conditions.iter().chain(growth) {
            data.push(vec![
                i.to_string(),
                c.condition.clone(),
                c.pass.to_string(),
                num(c.margin),
                c.witness.map(num).unwrap_or_default(),
            ]);
        }
    }
    Ok(CommandOutput {
        failed: !pass,
        report: report(&FamilyReport { pass, shift: entries }),
        data: Some(data),
        plot: None,
    })
}

#[derive(Serialize)]
struct AdmissibilityReport {
    admissible: bool,
    shifts: Vec<String>,
    evidence: AdmissibilityEvidence,
}

fn check_admissibility(cfg: &Config) -> Result<CommandOutput, CliError> {
    let members = build_shifts(cfg)?;
    let names = members.iter().map(|f| f.name()).collect();
    let start = members.iter().map(|f| f.t0()).fold(f64::MIN, f64::max);
    let tuple = ShiftTuple::new(members)?;
    let grid = TauGrid::new(
        start,
        start + cfg.span.unwrap_or(DEFAULT_SPAN),
        cfg.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
    );
    let evidence = check_admissibility_doubling(
        &tuple,
        cfg.directions.unwrap_or(256),
        cfg.horizon.unwrap_or(10.0),
        cfg.max_doublings.unwrap_or(0),
        &grid,
    )?;
    let admissible = evidence.verdict.is_admissible();
    Ok(CommandOutput {
        failed: !admissible,
        report: report(&AdmissibilityReport {
            admissible,
            shifts: names,
            evidence,
        }),
        data: None,
        plot: None,
    })
}

#[derive(Serialize)]
struct EvalReport {
    method: String,
    points: usize,
}

fn eval_zeta(cfg: &Config) -> Result<CommandOutput, CliError> {
    let sigmas = need(&cfg.point_sigma, "point_sigma")?;
    let ts = need(&cfg.point_t, "point_t")?;
    let n = sigmas.len().max(ts.len());
    let method = cfg.method.clone().unwrap_or_else(|| "afe".into());
    let c = cfg.afe_c.unwrap_or(AfeParams::DEFAULT_C);
    let kappa = cfg.kappa.unwrap_or(AfeParams::DEFAULT_KAPPA);
    let mut data = Table::new(["sigma", "t", "re", "im", "envelope", "length"]);
    for i in 0..n {
        let sigma = pick(&cfg.point_sigma, "point_sigma", i, n, 0.0)?;
        let t = pick(&cfg.point_t, "point_t", i, n, 0.0)?;
        let s = ComplexPoint::new(sigma, t);
        let (z, envelope, length) = match method.as_str() {
            "afe" => {
                let mut p = AfeParams::for_height(t, c, kappa);
                if let Some(x) = cfg.x {
                    p.x = x;
                }
                let v = zeta_afe(s, &p)?;
                (v.value, num(v.envelope), num(v.x))
            }
            "em" => {
                let v = zeta_em(s.to_complex(), cfg.em_order.unwrap_or(30))?;
                (v.value, num(v.last_term), v.n.to_string())
            }
            "smoothed" => {
                let x = need(&cfg.x, "x")?;
                (zeta_smoothed(s, x)?, String::new(), num(x))
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown method `{other}` (expected afe, em or smoothed)"
                )))
            }
        };
        data.push(vec![num(sigma), num(t), num(z.re), num(z.im), envelope, length]);
    }
    Ok(CommandOutput {
        failed: false,
        report: report(&EvalReport { method, points: n }),
        data: Some(data),
        plot: None,
    })
}

#[derive(Serialize)]
struct MeanValueEntry {
    #[serde(rename = "T")]
    t: f64,
    #[serde(flatten)]
    result: MeanValueReport,
}

#[derive(Serialize)]
struct MeanValueSummary {
    shift: String,
    coefficients: String,
    domain: String,
    sigma: f64,
    c: f64,
    run: Vec<MeanValueEntry>,
}

fn mean_value(cfg: &Config) -> Result<CommandOutput, CliError> {
    let shifts = build_shifts(cfg)?;
    let f = &shifts[0];
    let q = quadrature(cfg)?;
    let kind = cfg.coefficients.clone().unwrap_or_else(|| "ones".into());
    let coef = match kind.as_str() {
        "delta" => CoefficientSpec::delta(),
        "ones" => CoefficientSpec::ones(),
        "sequence" => CoefficientSpec::sequence(
            need(&cfg.coefficient_values, "coefficient_values")?
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
        ),
        other => {
            return Err(CliError::Config(format!(
                "unknown coefficients `{other}` (expected delta, ones or sequence)"
            )))
        }
    };
    let domain = cfg.domain.clone().unwrap_or_else(|| "u".into());
    let sigma = cfg.sigma.unwrap_or(0.75);
    let c = cfg.c.unwrap_or(2.0);
    let mut runs = Vec::new();
    let mut data = Table::new(["T", "ratio", "integral", "denominator", "error", "panels", "converged"]);
    for t in need(&cfg.big_t, "T")? {
        let r = match domain.as_str() {
            "u" => weighted_mean_square_ratio(&coef, sigma, t, c, f, &q)?,
            "t" => weighted_mean_square_ratio_t_domain(&coef, sigma, t, c, f, &q)?,
            other => return Err(CliError::Config(format!("unknown domain `{other}` (expected u or t)"))),
        };
        data.push(vec![
            num(t),
            num(r.ratio),
            num(r.integral),
            num(r.denominator),
            num(r.error),
            r.panels.to_string(),
            r.converged.to_string(),
        ]);
        runs.push(MeanValueEntry { t, result: r });
    }
    Ok(CommandOutput {
        failed: false,
        report: report(&MeanValueSummary {
            shift: f.name(),
            coefficients: kind,
            domain,
            sigma,
            c,
            run: runs,
        }),
        data: Some(data),
        plot: None,
    })
}

#[derive(Serialize)]
struct OscillatorySummary {
    phase: String,
    a: f64,
    b: f64,
    m: f64,
    #[serde(flatten)]
    result: OscillatoryReport,
}

fn oscillatory(cfg: &Config) -> Result<CommandOutput, CliError> {
    let q = quadrature(cfg)?;
    let (a, b) = pair(&cfg.interval, "interval")?;
    let k = cfg.phase_scale.unwrap_or(1.0);
    let phase = cfg.phase.clone().unwrap_or_else(|| "linear".into());
    let (f, df): (RealFn, RealFn) = match phase.as_str() {
        "linear" => (Box::new(move |x| k * x), Box::new(move |_| k)),
        "exp" => {
            let r = cfg.phase_rate.unwrap_or(1.0);
            (Box::new(move |x: f64| k * (r * x).exp()), Box::new(move |x: f64| k * r * (r * x).exp()))
        }
        "power" => {
            let p = cfg.phase_power.unwrap_or(2.0);
            (Box::new(move |x: f64| k * x.powf(p)), Box::new(move |x: f64| k * p * x.powf(p - 1.0)))
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown phase `{other}` (expected linear, exp or power)"
            )))
        }
    };
    let m = cfg.m.unwrap_or_else(|| df(a).abs().min(df(b).abs()));
    let result = oscillatory_bound_check(&f, &df, m, a, b, &q)?;
    Ok(CommandOutput {
        failed: !result.pass,
        report: report(&OscillatorySummary {
            phase,
            a,
            b,
            m,
            result,
        }),
        data: None,
        plot: None,
    })
}

#[derive(Serialize)]
struct WeylSummary {
    primes: Vec<u64>,
    index: Vec<Vec<i64>>,
    run: Vec<WeylReport>,
}

fn weyl(cfg: &Config) -> Result<CommandOutput, CliError> {
    let shifts = ShiftTuple::new(build_shifts(cfg)?)?;
    let q = quadrature(cfg)?;
    let primes = need(&cfg.primes, "primes")?;
    let idx = match &cfg.index {
        Some(rows) => IndexTuple::new(primes.clone(), rows.clone())?,
        None => IndexTuple::zero(primes.clone(), shifts.len())?,
    };
    let mut runs = Vec::new();
    for t in need(&cfg.big_t, "T")? {
        runs.push(zsl_core::equidistribution_bench::weyl_sum(&idx, &shifts, t, &q)?);
    }
    let mut data = Table::new(["T", "re", "im", "abs_gT", "bound", "min_slope", "panels", "converged"]);
    for w in &runs {
        data.push(vec![
            num(w.t),
            num(w.value.re),
            num(w.value.im),
            num(w.abs),
            w.bound.map(num).unwrap_or_default(),
            num(w.min_slope),
            w.panels.to_string(),
            w.converged.to_string(),
        ]);
    }
    let plot = plot_table(PlotSource::Weyl(&runs));
    Ok(CommandOutput {
        failed: false,
        report: report(&WeylSummary {
            primes,
            index: idx.n.clone(),
            run: runs,
        }),
        data: Some(data),
        plot: Some(plot),
    })
}

#[derive(Serialize)]
struct DiscrepancySummary {
    primes: Vec<u64>,
    #[serde(rename = "T")]
    t: f64,
    seed: u64,
    #[serde(flatten)]
    result: DiscrepancyReport,
}

fn discrepancy(cfg: &Config) -> Result<CommandOutput, CliError> {
    let shifts = ShiftTuple::new(build_shifts(cfg)?)?;
    let primes = need(&cfg.primes, "primes")?;
    let t = single(&cfg.big_t, "T")?;
    let seed = cfg.seed.unwrap_or(0);
    let result = torus_discrepancy(&shifts, &primes, t, cfg.samples.unwrap_or(10_000), seed)?;
    Ok(CommandOutput {
        failed: false,
        report: report(&DiscrepancySummary {
            primes,
            t,
            seed,
            result,
        }),
        data: None,
        plot: None,
    })
}

fn experiment(cfg: &Config) -> Result<ExperimentConfig, CliError> {
    let shifts = ShiftTuple::new(build_shifts(cfg)?)?;
    let r = shifts.len();
    let grid = match cfg.k_grid.as_deref() {
        None => (16, 16),
        Some([a, b]) => (*a, *b),
        Some(_) => return Err(CliError::Config("`k_grid` must have exactly two entries".into())),
    };
    let k = CompactSetSpec::new(pair(&cfg.k_sigma, "k_sigma")?, pair(&cfg.k_t, "k_t")?, grid)?;
    let mut targets = Vec::with_capacity(r);
    for i in 0..r {
        let re = pick(&cfg.target_re, "target_re", i, r, 1.0)?;
        let im = pick(&cfg.target_im, "target_im", i, r, 0.0)?;
        targets.push(Target::constant(Complex64::new(re, im))?);
    }
    let mut e = ExperimentConfig::new(k, shifts, targets, single(&cfg.big_t, "T")?);
    if let Some(v) = cfg.epsilon {
        e.epsilon = v;
    }
    if let Some(v) = cfg.n_tau {
        e.n_tau = v;
    }
    if let Some(v) = cfg.x {
        e.x = v;
    }
    e.seed = cfg.seed.unwrap_or(0);
    if let Some(s) = &cfg.sampling {
        e.sampling = match s.as_str() {
            "stratified" => Sampling::Stratified,
            "low-discrepancy" => Sampling::LowDiscrepancy,
            other => {
                return Err(CliError::Config(format!(
                    "unknown sampling `{other}` (expected stratified or low-discrepancy)"
                )))
            }
        };
    }
    match cfg.region_grid.as_deref() {
        None => {}
        Some([a, b]) => e.region_grid = (*a, *b),
        Some(_) => return Err(CliError::Config("`region_grid` must have exactly two entries".into())),
    }
    if let Some(v) = cfg.levels {
        e.levels = v;
    }
    e.validate()?;
    Ok(e)
}

fn evaluator(cfg: &Config) -> AfeEvaluator {
    AfeEvaluator {
        c: cfg.afe_c.unwrap_or(AfeParams::DEFAULT_C),
        kappa: cfg.kappa.unwrap_or(AfeParams::DEFAULT_KAPPA),
    }
}

#[derive(Serialize)]
struct DensitySummary {
    n_tau: usize,
    epsilon: f64,
    hit_fraction: f64,
    best_tau: f64,
    best_distance: f64,
    rejected: usize,
    quantiles: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    epsilon_sweep: Vec<(f64, f64)>,
}

fn density(cfg: &Config, par: &Parallelism) -> Result<CommandOutput, CliError> {
    let e = experiment(cfg)?;
    let r = density_estimate(&e, &evaluator(cfg), par)?;
    let mut sweep = cfg.epsilon_sweep.clone().unwrap_or_default();
    sweep.sort_by(f64::total_cmp);
    let mut header = vec!["tau".to_string()];
    header.extend((1..=e.shifts.len()).map(|j| format!("height_{j}")));
    header.extend(["D".to_string(), "hit".to_string()]);
    let mut data = Table::new(header);
    for rec in &r.records {
        let mut row = vec![num(rec.tau)];
        row.extend(rec.heights.iter().map(|&h| num(h)));
        row.push(num(rec.distance));
        row.push(u8::from(rec.hit).to_string());
        data.push(row);
    }
    let plot = plot_table(PlotSource::Density(&r));
    Ok(CommandOutput {
        failed: false,
        report: report(&DensitySummary {
            n_tau: e.n_tau,
            epsilon: r.epsilon,
            hit_fraction: r.hit_fraction,
            best_tau: r.best_tau,
            best_distance: r.best_distance,
            rejected: r.rejected,
            quantiles: r.quantiles.clone(),
            epsilon_sweep: sweep.iter().map(|&eps| (eps, r.hit_fraction_at(eps, e.n_tau))).collect(),
        }),
        data: Some(data),
        plot: Some(plot),
    })
}

fn truncation(cfg: &Config, par: &Parallelism) -> Result<CommandOutput, CliError> {
    let e = experiment(cfg)?;
    let xs = cfg.x_values.clone().unwrap_or_else(|| vec![50.0, 100.0, 200.0]);
    let r = truncation_discrepancy(&e, &xs, &evaluator(cfg), par)?;
    let mut data = Table::new(["X", "mean_distance", "std_error"]);
    for i in 0..r.x_values.len() {
        data.push(vec![num(r.x_values[i]), num(r.means[i]), num(r.std_errors[i])]);
    }
    let plot = plot_table(PlotSource::Truncation(&r));
    Ok(CommandOutput {
        failed: false,
        report: report(&r),
        data: Some(data),
        plot: Some(plot),
    })
}

#[derive(Serialize)]
struct RandomModelSummary {
    functional: Functional,
    x: f64,
    n_tau: usize,
    n_omega: usize,
    ks_gap: f64,
    haar_mean: Complex64,
    haar_std_error: f64,
    degenerate: bool,
}

fn random_model(cfg: &Config, par: &Parallelism) -> Result<CommandOutput, CliError> {
    let e = experiment(cfg)?;
    let functional = match cfg.functional.as_deref().unwrap_or("re-log") {
        "re-log" => Functional::ReLog {
            sigma: cfg.functional_sigma.unwrap_or(0.76),
        },
        "sup-distance" => Functional::SupDistance,
        other => {
            return Err(CliError::Config(format!(
                "unknown functional `{other}` (expected re-log or sup-distance)"
            )))
        }
    };
    let n_omega = cfg.n_omega.unwrap_or(2000);
    let r = random_model_compare(&e, n_omega, functional, &evaluator(cfg), par)?;
    let mut data = Table::new(["source", "value"]);
    for &v in &r.shifted {
        data.push(vec!["shifted".into(), num(v)]);
    }
    for &v in &r.random {
        data.push(vec!["random".into(), num(v)]);
    }
    Ok(CommandOutput {
        failed: false,
        report: report(&RandomModelSummary {
            functional: r.functional,
            x: r.x,
            n_tau: e.n_tau,
            n_omega,
            ks_gap: r.ks_gap,
            haar_mean: r.haar_mean,
            haar_std_error: r.haar_std_error,
            degenerate: r.degenerate,
        }),
        data: Some(data),
        plot: None,
    })
}

pub fn dispatch(sub: Subcommand, cfg: &Config, par: &Parallelism) -> Result<CommandOutput, CliError> {
    match sub {
        Subcommand::ValidateFamily => validate_family(cfg),
        Subcommand::CheckAdmissibility => check_admissibility(cfg),
        Subcommand::EvalZeta => eval_zeta(cfg),
        Subcommand::MeanValue => mean_value(cfg),
        Subcommand::Oscillatory => oscillatory(cfg),
        Subcommand::Weyl => weyl(cfg),
        Subcommand::Discrepancy => discrepancy(cfg),
        Subcommand::Density => density(cfg, par),
        Subcommand::Truncation => truncation(cfg, par),
        Subcommand::RandomModel => random_model(cfg, par),
    }
}

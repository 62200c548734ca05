//! Rectangles in the strip, their exhaustions, and the metrics `d` and `d̄`
//! on grid samples of holomorphic functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of exhaustion levels kept in `d`.
pub const DEFAULT_LEVELS: usize = 20;
/// Default cell-centred grid on the region (σ × t).
pub const DEFAULT_REGION_GRID: (usize, usize) = (12, 24);

/// Closed rectangle `K = [σ_lo, σ_hi] × [t_lo, t_hi]` inside `1/2 < σ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactSetSpec {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub grid_n_sigma: usize,
    pub grid_n_t: usize,
}

impl CompactSetSpec {
    pub fn new(sigma: (f64, f64), t: (f64, f64), grid: (usize, usize)) -> Result<Self> {
        let k = Self {
            sigma_lo: sigma.0,
            sigma_hi: sigma.1,
            t_lo: t.0,
            t_hi: t.1,
            grid_n_sigma: grid.0,
            grid_n_t: grid.1,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.sigma_lo, self.sigma_hi, self.t_lo, self.t_hi]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("compact set bounds must be finite".into()));
        }
        if !(0.5 < self.sigma_lo && self.sigma_lo <= self.sigma_hi && self.sigma_hi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 1/2 < sigma_lo <= sigma_hi < 1, got [{}, {}]",
                self.sigma_lo, self.sigma_hi
            )));
        }
        if self.t_lo > self.t_hi {
            return Err(Error::InvalidParameter(format!(
                "need t_lo <= t_hi, got [{}, {}]",
                self.t_lo, self.t_hi
            )));
        }
        if self.grid_n_sigma < 2 || self.grid_n_t < 2 {
            return Err(Error::InvalidParameter("K grid needs at least 2 points per side".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            sigma_lo: self.sigma_lo,
            sigma_hi: self.sigma_hi,
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            n_sigma: self.grid_n_sigma,
            n_t: self.grid_n_t,
            layout: GridLayout::Closed,
        }
    }

    /// Same rectangle, grid resolution doubled (`2n − 1` points per side).
    pub fn refined(&self) -> Self {
        Self {
            grid_n_sigma: 2 * self.grid_n_sigma - 1,
            grid_n_t: 2 * self.grid_n_t - 1,
            ..*self
        }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.sigma_lo + self.sigma_hi),
            0.5 * (self.t_lo + self.t_hi),
        )
    }

    pub fn max_abs_t(&self) -> f64 {
        self.t_lo.abs().max(self.t_hi.abs())
    }
}

/// Point placement of a rectangular grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridLayout {
    /// Includes the edges.
    Closed,
    /// Centres of `n_sigma × n_t` cells; stays inside an open rectangle.
    CellCentred,
}

/// Rectangular grid, stored σ-major: index `i_t · n_sigma + i_sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub n_sigma: usize,
    pub n_t: usize,
    pub layout: GridLayout,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.n_sigma * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(lo: f64, hi: f64, n: usize, i: usize, layout: GridLayout) -> f64 {
        match layout {
            GridLayout::Closed if n == 1 => 0.5 * (lo + hi),
            GridLayout::Closed => {
                let f = i as f64 / (n - 1) as f64;
                lo * (1.0 - f) + hi * f
            }
            GridLayout::CellCentred => lo + (hi - lo) * (i as f64 + 0.5) / n as f64,
        }
    }

    pub fn point(&self, index: usize) -> Complex64 {
        let (i, j) = (index % self.n_sigma, index / self.n_sigma);
        Complex64::new(
            Self::coord(self.sigma_lo, self.sigma_hi, self.n_sigma, i, self.layout),
            Self::coord(self.t_lo, self.t_hi, self.n_t, j, self.layout),
        )
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Grid points shifted vertically by `height`.
    pub fn shifted_points(&self, height: f64) -> Vec<Complex64> {
        self.points()
            .into_iter()
            .map(|p| p + Complex64::new(0.0, height))
            .collect()
    }
}

/// Samples of a function on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: grid.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "non-finite grid value at index {i}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(Complex64) -> Complex64>(grid: GridSpec, f: F) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: GridSpec, c: Complex64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Largest difference between horizontally or vertically adjacent samples.
    pub fn modulus(&self) -> f64 {
        let (ns, nt) = (self.grid.n_sigma, self.grid.n_t);
        let mut m: f64 = 0.0;
        for j in 0..nt {
            for i in 0..ns {
                let v = self.values[j * ns + i];
                if i + 1 < ns {
                    m = m.max((self.values[j * ns + i + 1] - v).norm());
                }
                if j + 1 < nt {
                    m = m.max((self.values[(j + 1) * ns + i] - v).norm());
                }
            }
        }
        m
    }
}

fn same_grid(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// The open rectangle `𝓡 = (σ₁, σ₂) × (t_min, t_max)` built around `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub sigma0: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl RegionSpec {
    /// Half the smaller side.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.sigma2 - self.sigma1).min(self.t_max - self.t_min)
    }

    pub fn grid(&self, n_sigma: usize, n_t: usize) -> GridSpec {
        GridSpec {
            sigma_lo: self.sigma1,
            sigma_hi: self.sigma2,
            t_lo: self.t_min,
            t_hi: self.t_max,
            n_sigma,
            n_t,
            layout: GridLayout::CellCentred,
        }
    }

    pub fn contains(&self, s: Complex64) -> bool {
        self.sigma1 < s.re && s.re < self.sigma2 && self.t_min < s.im && s.im < self.t_max
    }

    /// Distance from `s` to the boundary (non-positive outside).
    pub fn depth(&self, s: Complex64) -> f64 {
        (s.re - self.sigma1)
            .min(self.sigma2 - s.re)
            .min(s.im - self.t_min)
            .min(self.t_max - s.im)
    }
}

pub fn region_from_k(k: &CompactSetSpec) -> Result<RegionSpec> {
    k.validate()?;
    let sigma0 = (0.5 + k.sigma_lo) / 2.0;
    Ok(RegionSpec {
        sigma0,
        sigma1: (sigma0 + k.sigma_lo) / 2.0,
        sigma2: (1.0 + k.sigma_hi) / 2.0,
        t_min: k.t_lo - 0.5,
        t_max: k.t_hi + 0.5,
    })
}

/// Closed rectangle `K_ℓ` at distance `margin` inside the region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub margin: f64,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Level {
    pub fn contains(&self, s: Complex64) -> bool {
        self.sigma_lo <= s.re && s.re <= self.sigma_hi && self.t_lo <= s.im && s.im <= self.t_hi
    }

    pub fn contains_level(&self, other: &Level) -> bool {
        self.sigma_lo <= other.sigma_lo
            && other.sigma_hi <= self.sigma_hi
            && self.t_lo <= other.t_lo
            && other.t_hi <= self.t_hi
    }
}

/// Nested `K_1 ⊂ K_2 ⊂ …` with margins `δ_ℓ = w/(ℓ+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub region: RegionSpec,
    pub levels: Vec<Level>,
}

impl Exhaustion {
    pub fn margin(&self, level: usize) -> f64 {
        self.levels[level - 1].margin
    }

    /// `2^{-L}`, the neglected tail of `d`.
    pub fn tail_bound(&self) -> f64 {
        0.5f64.powi(self.levels.len() as i32)
    }

    /// Smallest `ℓ` with `s ∈ K_ℓ`.
    pub fn first_level(&self, s: Complex64) -> Option<usize> {
        self.levels.iter().position(|k| k.contains(s)).map(|i| i + 1)
    }
}

pub fn exhaustion_sets(region: &RegionSpec, levels: usize) -> Result<Exhaustion> {
    if levels == 0 {
        return Err(Error::InvalidParameter("need at least one exhaustion level".into()));
    }
    let w = region.half_width();
    let levels = (1..=levels)
        .map(|l| {
            let d = w / (l + 1) as f64;
            Level {
                margin: d,
                sigma_lo: region.sigma1 + d,
                sigma_hi: region.sigma2 - d,
                t_lo: region.t_min + d,
                t_hi: region.t_max - d,
            }
        })
        .collect();
    Ok(Exhaustion {
        region: *region,
        levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    /// Upper bound on the contribution of the dropped levels.
    pub tail_bound: f64,
}

/// Per-level sup distances `d_ℓ`, `ℓ = 1..=L`.
pub fn level_distances(g1: &GridFunction, g2: &GridFunction, ex: &Exhaustion) -> Result<Vec<f64>> {
    same_grid(g1, g2)?;
    let mut first_hit = vec![0.0f64; ex.levels.len()];
    for (idx, (a, b)) in g1.values.iter().zip(&g2.values).enumerate() {
        if let Some(l) = ex.first_level(g1.grid.point(idx)) {
            first_hit[l - 1] = first_hit[l - 1].max((a - b).norm());
        }
    }
    let mut running = 0.0f64;
    Ok(first_hit
        .into_iter()
        .map(|v| {
            running = running.max(v);
            running
        })
        .collect())
}

/// `d(g1, g2) = Σ_ℓ 2^{-ℓ} d_ℓ/(1 + d_ℓ)`, truncated at the exhaustion depth.
pub fn metric_d(g1: &GridFunction, g2: &GridFunction, ex: &Exhaustion) -> Result<MetricValue> {
    let dl = level_distances(g1, g2, ex)?;
    let mut weight = 1.0;
    let mut value = 0.0;
    for d in dl {
        weight *= 0.5;
        value += weight * d / (1.0 + d);
    }
    Ok(MetricValue {
        value,
        tail_bound: ex.tail_bound(),
    })
}

/// `d̄ = max_j d(g_{1j}, g_{2j})`.
pub fn joint_metric(a: &[GridFunction], b: &[GridFunction], ex: &Exhaustion) -> Result<MetricValue> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut value = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        value = value.max(metric_d(x, y, ex)?.value);
    }
    Ok(MetricValue {
        value,
        tail_bound: ex.tail_bound(),
    })
}

/// Max of `|g − f|` over the K grid.
pub fn sup_norm_on_k(g: &GridFunction, f: &GridFunction, k: &CompactSetSpec) -> Result<f64> {
    same_grid(g, f)?;
    if g.grid != k.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(g.values
        .iter()
        .zip(&f.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(sigma: (f64, f64), t: (f64, f64)) -> CompactSetSpec {
        CompactSetSpec::new(sigma, t, (4, 4)).unwrap()
    }

    #[test]
    fn region_examples() {
        let r = region_from_k(&k((0.7, 0.8), (-0.5, 0.5))).unwrap();
        assert!((r.sigma0 - 0.6).abs() < 1e-15);
        assert!((r.sigma1 - 0.65).abs() < 1e-15);
        assert!((r.sigma2 - 0.9).abs() < 1e-15);
        assert_eq!((r.t_min, r.t_max), (-1.0, 1.0));

        let p = region_from_k(&k((0.75, 0.75), (0.0, 0.0))).unwrap();
        assert_eq!(p.sigma0, 0.625);
        assert_eq!(p.sigma1, 0.6875);
        assert_eq!(p.sigma2, 0.875);
        assert_eq!((p.t_min, p.t_max), (-0.5, 0.5));
    }

    #[test]
    fn rejects_outside_strip() {
        assert!(CompactSetSpec::new((0.5, 0.7), (0.0, 1.0), (4, 4)).is_err());
        assert!(CompactSetSpec::new((0.6, 1.0), (0.0, 1.0), (4, 4)).is_err());
        assert!(CompactSetSpec::new((0.6, 0.7), (1.0, 0.0), (4, 4)).is_err());
    }

    #[test]
    fn levels_nest_with_shrinking_margins() {
        let r = region_from_k(&k((0.7, 0.8), (-0.5, 0.5))).unwrap();
        let ex = exhaustion_sets(&r, 20).unwrap();
        for l in 1..20 {
            assert!(ex.margin(l) > ex.margin(l + 1));
            assert!(ex.levels[l].contains_level(&ex.levels[l - 1]));
        }
    }

    #[test]
    fn constant_gap_metric() {
        let r = region_from_k(&k((0.7, 0.72), (-0.05, 0.05))).unwrap();
        let ex = exhaustion_sets(&r, 20).unwrap();
        let grid = r.grid(12, 24);
        let zero = GridFunction::constant(grid, Complex64::new(0.0, 0.0));
        let one = GridFunction::constant(grid, Complex64::new(1.0, 0.0));
        let d = metric_d(&zero, &one, &ex).unwrap();
        assert!((d.value - 0.5 * (1.0 - 0.5f64.powi(20))).abs() < 1e-15);
        assert_eq!(metric_d(&one, &one, &ex).unwrap().value, 0.0);
        assert_eq!(d.tail_bound, 0.5f64.powi(20));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let r = region_from_k(&k((0.7, 0.72), (-0.05, 0.05))).unwrap();
        let ex = exhaustion_sets(&r, 5).unwrap();
        let a = GridFunction::constant(r.grid(4, 4), Complex64::new(0.0, 0.0));
        let b = GridFunction::constant(r.grid(4, 5), Complex64::new(0.0, 0.0));
        assert_eq!(metric_d(&a, &b, &ex).unwrap_err(), Error::GridMismatch);
        assert!(joint_metric(&[a.clone()], &[], &ex).is_err());
    }

    #[test]
    fn sup_norm_constants() {
        let kk = k((0.7, 0.72), (-0.05, 0.05));
        let g = GridFunction::constant(kk.grid(), Complex64::new(1.2, 0.0));
        let f = GridFunction::constant(kk.grid(), Complex64::new(1.0, 0.0));
        assert!((sup_norm_on_k(&g, &f, &kk).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(sup_norm_on_k(&g, &g, &kk).unwrap(), 0.0);
    }

    #[test]
    fn closed_grid_hits_corners() {
        let kk = k((0.7, 0.72), (-0.05, 0.05));
        let pts = kk.grid().points();
        assert_eq!(pts[0], Complex64::new(0.7, -0.05));
        assert_eq!(pts[pts.len() - 1], Complex64::new(0.72, 0.05));
    }
}

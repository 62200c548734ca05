//! Batched evaluation of Dirichlet polynomials `Σ_{n≤N} b_n n^{-s}`.
//!
//! Points are grouped into tiles of small radius. Around a tile center `c`
//! the polynomial is a power series in `s − c` whose coefficients are the
//! moments `M_k = Σ b_n n^{-c} (−ln n)^k / k!`; one pass over `n` then
//! serves every point in the tile. Sparse tiles fall back to direct sums.

use num_complex::Complex64;

use crate::summation::ComplexSum;

/// Target value of `radius · ln N` for a tile.
const TILE_PHASE: f64 = 1.5;
const MAX_DEGREE: usize = 80;
/// Cost of one moment update relative to one `n^{-s}` evaluation.
const MOMENT_COST: f64 = 0.3;

/// `n^{-s}` given `ln n`.
#[inline]
pub fn n_pow_neg(ln_n: f64, s: Complex64) -> Complex64 {
    let mag = (-s.re * ln_n).exp();
    let (sin, cos) = (s.im * ln_n).sin_cos();
    Complex64::new(mag * cos, -mag * sin)
}

/// Direct compensated sum in ascending `n`.
pub fn eval_direct<F>(n_max: usize, coeff: &F, s: Complex64) -> Complex64
where
    F: Fn(usize) -> Complex64,
{
    let mut acc = ComplexSum::new();
    for n in 1..=n_max {
        let b = coeff(n);
        if b == Complex64::new(0.0, 0.0) {
            continue;
        }
        acc.add(b * n_pow_neg((n as f64).ln(), s));
    }
    acc.value()
}

/// Smallest truncation degree whose Taylor tail, relative to the term size,
/// stays below double precision for `x = radius · ln N`.
pub fn taylor_degree(x: f64) -> usize {
    let amplification = (2.0 * x).exp();
    let mut term = 1.0;
    for d in 0..MAX_DEGREE {
        term *= x / (d + 1) as f64;
        if term * amplification <= 1e-17 {
            return d;
        }
    }
    MAX_DEGREE
}

/// Moments `M_k`, `k = 0..=degree`, about `center`.
fn moments<F>(n_max: usize, coeff: &F, center: Complex64, degree: usize) -> Vec<Complex64>
where
    F: Fn(usize) -> Complex64,
{
    let inv: Vec<f64> = (1..=degree + 1).map(|k| 1.0 / k as f64).collect();
    let mut acc = vec![ComplexSum::new(); degree + 1];
    for n in 1..=n_max {
        let b = coeff(n);
        if b == Complex64::new(0.0, 0.0) {
            continue;
        }
        let ln_n = (n as f64).ln();
        let mut v = b * n_pow_neg(ln_n, center);
        for (k, a) in acc.iter_mut().enumerate() {
            a.add(v);
            v *= -ln_n * inv[k];
        }
    }
    acc.iter().map(|a| a.value()).collect()
}

fn horner(m: &[Complex64], h: Complex64) -> Complex64 {
    m.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &mk| acc * h + mk)
}

/// Evaluates `Σ_{n≤n_max} coeff(n) n^{-s}` at every point, in input order.
pub fn eval_points<F>(n_max: usize, coeff: F, points: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(usize) -> Complex64,
{
    if points.is_empty() {
        return Vec::new();
    }
    if n_max <= 1 {
        let b = if n_max == 1 { coeff(1) } else { Complex64::new(0.0, 0.0) };
        return vec![b; points.len()];
    }
    let ln_max = (n_max as f64).ln();
    let (mut s_lo, mut s_hi, mut t_lo, mut t_hi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        s_lo = s_lo.min(p.re);
        s_hi = s_hi.max(p.re);
        t_lo = t_lo.min(p.im);
        t_hi = t_hi.max(p.im);
    }
    let side = TILE_PHASE / ln_max * std::f64::consts::SQRT_2;
    let ns = (((s_hi - s_lo) / side).ceil() as usize).max(1);
    let nt = (((t_hi - t_lo) / side).ceil() as usize).max(1);
    let mut tiles: Vec<Vec<usize>> = vec![Vec::new(); ns * nt];
    for (i, p) in points.iter().enumerate() {
        let is = (((p.re - s_lo) / side) as usize).min(ns - 1);
        let it = (((p.im - t_lo) / side) as usize).min(nt - 1);
        tiles[it * ns + is].push(i);
    }

    let mut out = vec![Complex64::new(0.0, 0.0); points.len()];
    for tile in tiles.iter().filter(|t| !t.is_empty()) {
        let (mut a, mut b, mut c, mut d) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &i in tile {
            a = a.min(points[i].re);
            b = b.max(points[i].re);
            c = c.min(points[i].im);
            d = d.max(points[i].im);
        }
        let center = Complex64::new(0.5 * (a + b), 0.5 * (c + d));
        let radius = tile
            .iter()
            .map(|&i| (points[i] - center).norm())
            .fold(0.0, f64::max);
        let degree = taylor_degree(radius * ln_max);
        let batched_cost = 1.0 + MOMENT_COST * (degree + 1) as f64;
        if (tile.len() as f64) <= batched_cost {
            for &i in tile {
                out[i] = eval_direct(n_max, &coeff, points[i]);
            }
        } else {
            let m = moments(n_max, &coeff, center, degree);
            for &i in tile {
                out[i] = horner(&m, points[i] - center);
            }
        }
    }
    out
}


/// Taylor expansions of `t ↦ Σ_{n≤N} b_n n^{-σ-it}` covering `[t_lo, t_hi]`
/// on a fixed vertical line, for repeated evaluation at arbitrary `t`.
#[derive(Debug, Clone)]
pub struct LineExpansion {
    t_lo: f64,
    width: f64,
    tiles: Vec<Vec<Complex64>>,
}

impl LineExpansion {
    pub fn new<F>(n_max: usize, coeff: &F, sigma: f64, t_lo: f64, t_hi: f64) -> Self
    where
        F: Fn(usize) -> Complex64,
    {
        let ln_max = (n_max.max(2) as f64).ln();
        let span = (t_hi - t_lo).max(0.0);
        let count = ((span * ln_max / (2.0 * TILE_PHASE)).ceil() as usize).max(1);
        let width = span / count as f64;
        let degree = taylor_degree(0.5 * width * ln_max);
        let tiles = (0..count)
            .map(|i| {
                let c = Complex64::new(sigma, t_lo + (i as f64 + 0.5) * width);
                moments(n_max, coeff, c, degree)
            })
            .collect();
        Self {
            t_lo,
            width,
            tiles,
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let i = if self.width > 0.0 {
            (((t - self.t_lo) / self.width) as isize).clamp(0, self.tiles.len() as isize - 1) as usize
        } else {
            0
        };
        let center = self.t_lo + (i as f64 + 0.5) * self.width;
        horner(&self.tiles[i], Complex64::new(0.0, t - center))
    }
}

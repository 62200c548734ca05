//! Adaptive Gauss–Kronrod quadrature on panels whose phase change is bounded.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::ComplexSum;

/// Kronrod abscissae on `[0, 1]`; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Largest phase change allowed across one panel.
    pub max_phase: f64,
    pub abs_tol: f64,
    pub max_panels: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            max_phase: FRAC_PI_4,
            abs_tol: 1e-9,
            max_panels: 100_000_000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_phase > 0.0 && self.max_phase < std::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!(
                "panel phase bound must lie in (0, π), got {}",
                self.max_phase
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidParameter("panel budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    /// Sum of the per-panel Kronrod–Gauss differences.
    pub error: f64,
    /// Leaf panels after adaptive splitting.
    pub panels: u64,
    pub converged: bool,
}

impl QuadResult {
    fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            panels: 0,
            converged: true,
        }
    }

    fn absorb(&mut self, other: QuadResult) {
        self.value += other.value;
        self.error += other.error;
        self.panels += other.panels;
        self.converged &= other.converged;
    }
}

/// One GK15 rule on `[a, b]`: (Kronrod value, |Kronrod − Gauss|).
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        k += pair * WGK[i];
        if i % 2 == 1 {
            g += pair * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive bisection on one panel until the error estimate meets `tol`.
pub fn integrate_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> QuadResult {
    fn go<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> QuadResult {
        let (v, e) = gk15(f, a, b);
        if e <= tol.max(1e-13 * v.norm()) || depth >= MAX_DEPTH {
            return QuadResult {
                value: v,
                error: e,
                panels: 1,
                converged: e <= tol.max(1e-13 * v.norm()),
            };
        }
        let m = 0.5 * (a + b);
        let mut left = go(f, a, m, 0.5 * tol, depth + 1);
        left.absorb(go(f, m, b, 0.5 * tol, depth + 1));
        left
    }
    go(f, a, b, tol, 0)
}

/// Integrates over consecutive panels given by `edges`, distributing the
/// tolerance by length and summing panels in order.
pub fn integrate_edges<F: Fn(f64) -> Complex64>(f: &F, edges: &[f64], abs_tol: f64) -> QuadResult {
    let mut out = QuadResult::zero();
    if edges.len() < 2 {
        return out;
    }
    let total = edges[edges.len() - 1] - edges[0];
    let mut acc = ComplexSum::new();
    for w in edges.windows(2) {
        let share = if total > 0.0 { abs_tol * (w[1] - w[0]) / total } else { abs_tol };
        let r = integrate_panel(f, w[0], w[1], share);
        acc.add(r.value);
        out.error += r.error;
        out.panels += r.panels;
        out.converged &= r.converged;
    }
    out.value = acc.value();
    out
}

/// Panel edges on `[a, b]` such that `max |F'| · width ≤ max_phase` on each
/// panel, for `F'` monotone between consecutive `breaks`.
pub fn phase_panels<D: Fn(f64) -> f64>(
    dphase: &D,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let mut stops: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    stops.push(b);
    let min_width = (b - a) * 1e-13;
    let mut edges = vec![a];
    let mut x = a;
    for stop in stops {
        while x < stop {
            let rate = dphase(x).abs();
            let mut h = if rate > 0.0 { spec.max_phase / rate } else { stop - x };
            for _ in 0..4 {
                let end = (x + h).min(stop);
                let r = dphase(end).abs().max(rate);
                if r * (end - x) <= spec.max_phase * (1.0 + 1e-12) {
                    break;
                }
                h = spec.max_phase / r;
            }
            let next = if x + h >= stop { stop } else { x + h.max(min_width) };
            edges.push(next);
            x = next;
            if edges.len() as u64 > spec.max_panels + 1 {
                return Err(Error::PanelBudget { max_t: f64::NAN });
            }
        }
    }
    Ok(edges)
}

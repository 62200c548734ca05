//! Evaluators for ζ(s), its smoothed truncations ζ_X and the random
//! models ζ(s, ω), ζ_X(s, ω).

pub mod dirichlet;
pub mod em;
pub mod omega;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::ComplexSum;

pub use em::{zeta_em, EmValue};
pub use omega::OmegaAssignment;

/// Heights beyond this are outside the evaluators' working range.
pub const MAX_HEIGHT: f64 = 1e7;

/// `s = σ + it`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Self {
        Self { sigma, t }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }

    pub fn conj(self) -> Self {
        Self::new(self.sigma, -self.t)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

/// Parameters of the approximate functional equation
/// `ζ(s) = Σ_{n≤x} n^{-s} + x^{1-s}/(s−1) + O(x^{-σ})` on `|t| < 2πx/C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfeParams {
    pub c: f64,
    pub x: f64,
    pub kappa: f64,
}

impl AfeParams {
    pub const DEFAULT_C: f64 = 4.0;
    pub const DEFAULT_KAPPA: f64 = 10.0;

    /// Default length policy `x = max(64, 1.25·C|t|/(2π))`.
    pub fn for_height(t: f64, c: f64, kappa: f64) -> Self {
        Self {
            c,
            x: default_length(t, c),
            kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 1.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must exceed 1, got {}", self.c)));
        }
        if !(self.x >= 2.0 && self.x.is_finite()) {
            return Err(Error::InvalidParameter(format!("x must be at least 2, got {}", self.x)));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidParameter("kappa must be positive".into()));
        }
        Ok(())
    }

    /// Smallest admissible `x` for height `t` (exclusive).
    pub fn min_length(&self, t: f64) -> f64 {
        self.c * t.abs() / (2.0 * PI)
    }

    pub fn in_range(&self, t: f64) -> bool {
        t.abs() < 2.0 * PI * self.x / self.c
    }
}

pub fn default_length(t: f64, c: f64) -> f64 {
    (c * t.abs() / (2.0 * PI) * 1.25).max(64.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfeValue {
    pub value: Complex64,
    /// `kappa · x^{-σ}`.
    pub envelope: f64,
    pub x: f64,
}

fn afe_main_term(s: Complex64, x: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    ((one - s) * x.ln()).exp() / (s - one)
}

/// ζ(s) from the approximate functional equation, with its error envelope.
pub fn zeta_afe(s: ComplexPoint, params: &AfeParams) -> Result<AfeValue> {
    params.validate()?;
    if s.sigma < 0.1 || !s.t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma must be at least 0.1, got {}",
            s.sigma
        )));
    }
    if s.sigma == 1.0 && s.t == 0.0 {
        return Err(Error::Pole);
    }
    if !params.in_range(s.t) {
        return Err(Error::OutOfRange {
            t: s.t,
            min_x: params.min_length(s.t),
        });
    }
    let z = s.to_complex();
    let n = params.x.floor() as usize;
    let partial = dirichlet::eval_direct(n, &|_| Complex64::new(1.0, 0.0), z);
    Ok(AfeValue {
        value: partial + afe_main_term(z, params.x),
        envelope: params.kappa * params.x.powf(-s.sigma),
        x: params.x,
    })
}

/// ζ at many points sharing one sum length `x`.
///
/// Agrees with [`zeta_afe`] at every point; the sum is organised by
/// [`dirichlet::eval_points`].
pub fn zeta_afe_points(points: &[Complex64], params: &AfeParams) -> Result<Vec<Complex64>> {
    params.validate()?;
    for p in points {
        if p.re < 0.1 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be at least 0.1, got {}",
                p.re
            )));
        }
        if p.re == 1.0 && p.im == 0.0 {
            return Err(Error::Pole);
        }
        if !params.in_range(p.im) {
            return Err(Error::OutOfRange {
                t: p.im,
                min_x: params.min_length(p.im),
            });
        }
    }
    let n = params.x.floor() as usize;
    let partial = dirichlet::eval_points(n, |_| Complex64::new(1.0, 0.0), points);
    Ok(partial
        .into_iter()
        .zip(points)
        .map(|(v, &s)| v + afe_main_term(s, params.x))
        .collect())
}

/// AFE parameters covering every point with the default length policy.
pub fn params_for_points(points: &[Complex64], c: f64, kappa: f64) -> AfeParams {
    let t_max = points.iter().map(|p| p.im.abs()).fold(0.0, f64::max);
    AfeParams::for_height(t_max, c, kappa)
}

/// The fixed smooth cutoff: 1 on `[0,1]`, 0 on `[2,∞)`, and
/// `g(2−x)/(g(2−x)+g(x−1))` between, with `g(u) = e^{−1/u}`.
pub fn smooth_cutoff(x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        let g = |u: f64| (-1.0 / u).exp();
        let a = g(2.0 - x);
        let b = g(x - 1.0);
        a / (a + b)
    }
}

fn check_truncation(x: f64) -> Result<usize> {
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("X must be at least 2, got {x}")));
    }
    Ok((2.0 * x).floor() as usize)
}

/// Number of terms of ζ_X (φ vanishes from `n = 2X` on).
pub fn smoothed_length(x: f64) -> Result<usize> {
    check_truncation(x)
}

/// `ζ_X(s) = Σ φ(n/X) n^{-s}`, summed over `n ≤ 2X`.
pub fn zeta_smoothed(s: ComplexPoint, x: f64) -> Result<Complex64> {
    let n = check_truncation(x)?;
    Ok(dirichlet::eval_direct(
        n,
        &|m| Complex64::new(smooth_cutoff(m as f64 / x), 0.0),
        s.to_complex(),
    ))
}

/// ζ_X at many points.
pub fn zeta_smoothed_points(points: &[Complex64], x: f64) -> Result<Vec<Complex64>> {
    let n = check_truncation(x)?;
    Ok(dirichlet::eval_points(
        n,
        |m| Complex64::new(smooth_cutoff(m as f64 / x), 0.0),
        points,
    ))
}

/// `Π_{p≤P} (1 − ω(p)p^{-s})^{-1}`.
pub fn random_euler_product(s: ComplexPoint, omega: &OmegaAssignment) -> Result<Complex64> {
    if !(s.sigma > 0.5) {
        return Err(Error::SigmaTooSmall { sigma: s.sigma });
    }
    let z = s.to_complex();
    let one = Complex64::new(1.0, 0.0);
    let mut prod = one;
    for &p in omega.primes() {
        let term = omega.phase(p as u64) * dirichlet::n_pow_neg((p as f64).ln(), z);
        prod /= one - term;
    }
    Ok(prod)
}

/// Coefficients `ω(n)φ(n/X)` of ζ_X(s, ω), index `n − 1`.
pub fn smoothed_random_coefficients(omega: &OmegaAssignment, x: f64) -> Result<Vec<Complex64>> {
    let n = check_truncation(x)?;
    if omega.prime_cutoff() < n as u64 {
        return Err(Error::PrimeCutoffTooSmall {
            have: omega.prime_cutoff(),
            need: n as u64,
        });
    }
    let w = omega.values_up_to(n)?;
    Ok(w.into_iter()
        .enumerate()
        .map(|(i, v)| v * smooth_cutoff((i + 1) as f64 / x))
        .collect())
}

/// `ζ_X(s, ω) = Σ ω(n) φ(n/X) n^{-s}`.
pub fn zeta_smoothed_random(s: ComplexPoint, omega: &OmegaAssignment, x: f64) -> Result<Complex64> {
    let coeffs = smoothed_random_coefficients(omega, x)?;
    Ok(dirichlet::eval_direct(coeffs.len(), &|n| coeffs[n - 1], s.to_complex()))
}

/// ζ_X(·, ω) at many points.
pub fn zeta_smoothed_random_points(
    points: &[Complex64],
    omega: &OmegaAssignment,
    x: f64,
) -> Result<Vec<Complex64>> {
    let coeffs = smoothed_random_coefficients(omega, x)?;
    Ok(dirichlet::eval_points(coeffs.len(), |n| coeffs[n - 1], points))
}

/// Compensated complex mean.
pub fn complex_mean(values: &[Complex64]) -> Complex64 {
    values.iter().copied().collect::<ComplexSum>().value() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const ZETA2: f64 = PI * PI / 6.0;

    #[test]
    fn cutoff_values() {
        assert_eq!(smooth_cutoff(0.0), 1.0);
        assert_eq!(smooth_cutoff(0.5), 1.0);
        assert_eq!(smooth_cutoff(2.5), 0.0);
        assert_eq!(smooth_cutoff(1.5), 0.5);
        for i in 0..=400 {
            let v = smooth_cutoff(i as f64 * 0.01);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn cutoff_is_monotone() {
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = smooth_cutoff(1.0 + i as f64 * 1e-3);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn cutoff_flat_at_joints() {
        // First and second finite differences vanish to rounding at x = 1 and x = 2.
        for &j in &[1.0, 2.0] {
            for &h in &[1e-2, 2e-2] {
                let d1 = (smooth_cutoff(j + h) - smooth_cutoff(j - h)) / (2.0 * h);
                let d2 = (smooth_cutoff(j + h) - 2.0 * smooth_cutoff(j) + smooth_cutoff(j - h)) / (h * h);
                assert!(d1.abs() < 1e-15, "d1 at {j}: {d1}");
                assert!(d2.abs() < 1e-12, "d2 at {j}: {d2}");
            }
        }
    }

    #[test]
    fn afe_at_two() {
        let p = AfeParams { c: 4.0, x: 100.0, kappa: 10.0 };
        let v = zeta_afe(ComplexPoint::new(2.0, 0.0), &p).unwrap();
        assert!((v.value.re - ZETA2).abs() < 0.1);
        assert!((v.value.re - ZETA2).abs() < v.envelope);
        assert_eq!(v.envelope, 10.0 * 100f64.powi(-2));
    }

    #[test]
    fn afe_rejects_range() {
        let p = AfeParams { c: 4.0, x: 100.0, kappa: 10.0 };
        let e = zeta_afe(ComplexPoint::new(0.75, 200.0), &p).unwrap_err();
        match e {
            Error::OutOfRange { min_x, .. } => assert!((min_x - 4.0 * 200.0 / (2.0 * PI)).abs() < 1e-12),
            e => panic!("{e:?}"),
        }
        assert_eq!(
            zeta_afe(ComplexPoint::new(1.0, 0.0), &p).unwrap_err(),
            Error::Pole
        );
    }

    #[test]
    fn smoothed_at_two() {
        let v = zeta_smoothed(ComplexPoint::new(2.0, 0.0), 1000.0).unwrap();
        assert!((v.re - ZETA2).abs() < 1e-3);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn random_ones_equals_smoothed() {
        let ones = OmegaAssignment::ones(500).unwrap();
        for &(sg, t) in &[(0.75, 0.0), (0.6, 33.0), (2.0, -5.0)] {
            let s = ComplexPoint::new(sg, t);
            let a = zeta_smoothed(s, 100.0).unwrap();
            let b = zeta_smoothed_random(s, &ones, 100.0).unwrap();
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn random_expansion_small_x() {
        let omega = OmegaAssignment::sample(5, 10).unwrap();
        let v = zeta_smoothed_random(ComplexPoint::new(1.0, 0.0), &omega, 2.0).unwrap();
        let expect = Complex64::new(1.0, 0.0) + omega.phase(2) / 2.0 + 0.5 * omega.phase(3) / 3.0;
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn random_requires_cutoff() {
        let omega = OmegaAssignment::sample(5, 100).unwrap();
        match zeta_smoothed_random(ComplexPoint::new(0.75, 0.0), &omega, 60.0) {
            Err(Error::PrimeCutoffTooSmall { need, .. }) => assert_eq!(need, 120),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn euler_product_single_factor() {
        let omega = OmegaAssignment::from_angle_fn(2, |_| PI).unwrap();
        let v = random_euler_product(ComplexPoint::new(2.0, 0.0), &omega).unwrap();
        assert!((v - Complex64::new(0.8, 0.0)).norm() < 1e-15);
        assert!(random_euler_product(ComplexPoint::new(0.5, 0.0), &omega).is_err());
    }

    #[test]
    fn points_agree_with_single() {
        let pts: Vec<Complex64> = (0..30)
            .map(|i| Complex64::new(0.7 + 0.001 * i as f64, 5000.0 + 0.003 * i as f64))
            .collect();
        let p = params_for_points(&pts, 4.0, 10.0);
        let batch = zeta_afe_points(&pts, &p).unwrap();
        for (z, b) in pts.iter().zip(&batch) {
            let single = zeta_afe(ComplexPoint::from(*z), &p).unwrap().value;
            assert!((single - b).norm() < 1e-10);
        }
    }
}

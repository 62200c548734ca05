//! Euler–Maclaurin evaluation of ζ(s), used as the independent reference.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dirichlet::n_pow_neg;
use crate::error::{Error, Result};
use crate::summation::ComplexSum;

pub const MAX_ORDER: usize = 30;
const TARGET_REL: f64 = 1e-10;

/// `B_{2k}/(2k)!` for `k = 1..=MAX_ORDER`, via `2(−1)^{k+1} ζ(2k)/(2π)^{2k}`.
fn bernoulli_ratios() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=MAX_ORDER)
            .map(|k| {
                let two_k = 2 * k as i32;
                let zeta = if k == 1 {
                    PI * PI / 6.0
                } else {
                    let n = 1000.0f64;
                    let mut acc = ComplexSum::new();
                    for m in (1..1000).rev() {
                        acc.add(Complex64::new((m as f64).powi(-two_k), 0.0));
                    }
                    acc.value().re
                        + n.powi(1 - two_k) / (two_k - 1) as f64
                        + 0.5 * n.powi(-two_k)
                        + two_k as f64 * n.powi(-two_k - 1) / 12.0
                };
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * 2.0 * zeta / (2.0 * PI).powi(two_k)
            })
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmValue {
    pub value: Complex64,
    /// Magnitude of the last correction term used.
    pub last_term: f64,
    pub terms: usize,
    /// Cut-off length of the direct sum.
    pub n: usize,
    /// The last term met the relative target.
    pub converged: bool,
}

/// ζ(s) by Euler–Maclaurin summation with up to `order` correction terms.
pub fn zeta_em(s: Complex64, order: usize) -> Result<EmValue> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidParameter("s must be finite".into()));
    }
    let n = ((s.norm() / PI).ceil() as usize).max(16);
    let mut acc = ComplexSum::new();
    for m in 1..n {
        acc.add(n_pow_neg((m as f64).ln(), s));
    }
    let nf = n as f64;
    let n_pow = n_pow_neg(nf.ln(), s);
    let one = Complex64::new(1.0, 0.0);
    acc.add(n_pow * nf / (s - one));
    acc.add(0.5 * n_pow);

    let b = bernoulli_ratios();
    let mut poch = s;
    let mut power = n_pow / nf;
    let mut last = f64::INFINITY;
    let mut used = 0;
    for (k, &bk) in b.iter().enumerate().take(order) {
        let term = bk * poch * power;
        acc.add(term);
        last = term.norm();
        used = k + 1;
        if last <= 1e-17 * acc.value().norm() {
            break;
        }
        let j = 2.0 * (k + 1) as f64;
        poch *= (s + (j - 1.0)) * (s + j);
        power /= nf * nf;
    }
    let value = acc.value();
    Ok(EmValue {
        value,
        last_term: last,
        terms: used,
        n,
        converged: last <= TARGET_REL * value.norm().max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small_values() {
        let b = bernoulli_ratios();
        assert!((b[0] - 1.0 / 12.0).abs() < 1e-16);
        assert!((b[1] + 1.0 / 720.0).abs() < 1e-18);
        assert!((b[2] - 1.0 / 30240.0).abs() < 1e-19);
    }

    #[test]
    fn pole_rejected() {
        assert_eq!(zeta_em(Complex64::new(1.0, 0.0), 10), Err(Error::Pole));
        assert!(zeta_em(Complex64::new(2.0, 0.0), 31).is_err());
    }
}

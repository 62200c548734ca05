//! Points of the infinite torus restricted to the primes up to a cutoff.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::primes::Sieve;

/// Independent unit phases `ω(p)` for every prime `p ≤ P`, stored as
/// angles, with the completely multiplicative extension `ω(n)`.
#[derive(Debug, Clone)]
pub struct OmegaAssignment {
    sieve: Arc<Sieve>,
    /// Angle of `ω(p)`, indexed by `p`; zero elsewhere.
    angles: Vec<f64>,
    seed: Option<u64>,
}

impl OmegaAssignment {
    /// Haar-random phases; the angle for `p` depends only on `(seed, p)`.
    pub fn sample(seed: u64, prime_cutoff: u64) -> Result<Self> {
        Ok(Self::sample_with_sieve(seed, shared_sieve(prime_cutoff)?))
    }

    pub fn sample_with_sieve(seed: u64, sieve: Arc<Sieve>) -> Self {
        let mut angles = vec![0.0; sieve.limit() + 1];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for &p in sieve.primes() {
            rng.set_stream(p as u64);
            rng.set_word_pos(0);
            angles[p as usize] = rng.gen::<f64>() * TAU;
        }
        Self {
            sieve,
            angles,
            seed: Some(seed),
        }
    }

    /// `ω ≡ 1`.
    pub fn ones(prime_cutoff: u64) -> Result<Self> {
        Self::from_angle_fn(prime_cutoff, |_| 0.0)
    }

    /// Explicit angles `θ(p)` with `ω(p) = e^{iθ(p)}`.
    pub fn from_angle_fn<F: Fn(u64) -> f64>(prime_cutoff: u64, angle: F) -> Result<Self> {
        let sieve = shared_sieve(prime_cutoff)?;
        let mut angles = vec![0.0; sieve.limit() + 1];
        for &p in sieve.primes() {
            angles[p as usize] = angle(p as u64);
        }
        Ok(Self {
            sieve,
            angles,
            seed: None,
        })
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn prime_cutoff(&self) -> u64 {
        self.sieve.limit() as u64
    }

    pub fn primes(&self) -> &[u32] {
        self.sieve.primes()
    }

    pub fn angle(&self, p: u64) -> f64 {
        self.angles[p as usize]
    }

    /// `ω(p)` for prime `p ≤ P`.
    pub fn phase(&self, p: u64) -> Complex64 {
        Complex64::from_polar(1.0, self.angle(p))
    }

    /// Angles `arg ω(n)` for `n = 1..=n_max` (index `n − 1`).
    fn angles_up_to(&self, n_max: usize) -> Vec<f64> {
        let mut theta = vec![0.0; n_max];
        for n in 2..=n_max {
            let p = self.sieve.smallest_factor(n) as usize;
            theta[n - 1] = self.angles[p] + theta[n / p - 1];
        }
        theta
    }

    /// `ω(n) = Π ω(p)^{ν(n;p)}`, with `ω(1) = 1`.
    pub fn value(&self, n: u64) -> Result<Complex64> {
        if n == 0 || n > self.prime_cutoff().max(1) {
            return Err(Error::PrimeCutoffTooSmall {
                have: self.prime_cutoff(),
                need: n,
            });
        }
        let theta: f64 = self
            .sieve
            .factorize(n as usize)
            .iter()
            .map(|&(p, e)| e as f64 * self.angles[p as usize])
            .sum();
        Ok(Complex64::from_polar(1.0, theta))
    }

    /// `ω(1..=n_max)`; requires `n_max ≤ P`.
    pub fn values_up_to(&self, n_max: usize) -> Result<Vec<Complex64>> {
        if n_max > self.sieve.limit().max(1) {
            return Err(Error::PrimeCutoffTooSmall {
                have: self.prime_cutoff(),
                need: n_max as u64,
            });
        }
        Ok(self
            .angles_up_to(n_max)
            .into_iter()
            .map(|t| Complex64::from_polar(1.0, t))
            .collect())
    }
}

/// Sieve up to `P ≥ 2`.
pub fn shared_sieve(prime_cutoff: u64) -> Result<Arc<Sieve>> {
    if prime_cutoff < 2 {
        return Err(Error::InvalidParameter(format!(
            "prime cutoff must be at least 2, got {prime_cutoff}"
        )));
    }
    Ok(Arc::new(Sieve::new(prime_cutoff as usize)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_by_seed() {
        let a = OmegaAssignment::sample(7, 1000).unwrap();
        let b = OmegaAssignment::sample(7, 1000).unwrap();
        let c = OmegaAssignment::sample(8, 1000).unwrap();
        assert_eq!(a.angles, b.angles);
        assert_ne!(a.angles, c.angles);
    }

    #[test]
    fn angle_independent_of_cutoff() {
        let a = OmegaAssignment::sample(3, 100).unwrap();
        let b = OmegaAssignment::sample(3, 10_000).unwrap();
        for &p in a.primes() {
            assert_eq!(a.angle(p as u64), b.angle(p as u64));
        }
    }

    #[test]
    fn unit_modulus() {
        let a = OmegaAssignment::sample(1, 500).unwrap();
        for &p in a.primes() {
            assert!((a.phase(p as u64).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn multiplicative_extension() {
        let a = OmegaAssignment::sample(11, 100).unwrap();
        let w12 = a.value(12).unwrap();
        let expect = a.phase(2) * a.phase(2) * a.phase(3);
        assert!((w12 - expect).norm() < 1e-14);
        assert_eq!(a.value(1).unwrap(), Complex64::new(1.0, 0.0));
        let table = a.values_up_to(100).unwrap();
        for n in 1..=100u64 {
            assert!((table[n as usize - 1] - a.value(n).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_beyond_cutoff() {
        let a = OmegaAssignment::ones(10).unwrap();
        assert!(a.values_up_to(11).is_err());
        assert!(OmegaAssignment::sample(0, 1).is_err());
    }
}

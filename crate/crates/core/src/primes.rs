//! Smallest-prime-factor sieve.

/// Sieve of smallest prime factors for `0..=limit`.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl Sieve {
    /// Linear sieve up to and including `limit`.
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > limit {
                    break;
                }
                spf[m] = p;
            }
        }
        Self { spf, primes }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && n <= self.limit() && self.spf[n] as usize == n
    }

    /// Smallest prime factor of `n` (n ≥ 2).
    #[inline]
    pub fn smallest_factor(&self, n: usize) -> u32 {
        self.spf[n]
    }

    /// Prime factorization as `(p, exponent)` pairs in ascending order.
    pub fn factorize(&self, mut n: usize) -> Vec<(u32, u32)> {
        assert!(n >= 1 && n <= self.limit(), "n out of sieve range");
        let mut out: Vec<(u32, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n];
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
            n /= p as usize;
        }
        out
    }
}

/// Trial-division primality, used to validate user prime sets.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

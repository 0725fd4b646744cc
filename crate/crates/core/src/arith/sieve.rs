use serde::Serialize;

use super::primality;
use crate::error::{Error, Result};

/// Largest supported sieve limit.
pub const MAX_SIEVE_LIMIT: u64 = 1_000_000_000;

/// Values per sieve segment.
pub const SEGMENT_LEN: u64 = 1 << 20;

/// Least-prime-factor table for `2..=limit`.
///
/// Even numbers are implicit (their least prime factor is 2). For odd `n` the
/// table stores the least prime factor when `n` is composite and 0 when `n`
/// is prime. A composite `n <= limit` has `lpf(n) <= sqrt(limit) < 2^16`, so a
/// `u16` entry suffices for every supported limit.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    odd_lpf: Vec<u16>,
    primes: Vec<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SieveSummary {
    pub limit: u64,
    pub prime_count: usize,
    pub largest_prime: Option<u32>,
}

fn simple_primes(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl PrimeTable {
    /// Segmented least-prime-factor sieve up to `limit`.
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Capacity(format!("sieve limit {limit} below 2")));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::Capacity(format!(
                "sieve limit {limit} exceeds cap {MAX_SIEVE_LIMIT}"
            )));
        }
        let base = simple_primes(primality::isqrt(limit));
        let mut odd_lpf = vec![0u16; limit.div_ceil(2) as usize];

        let mut lo = 1u64;
        while lo <= limit {
            let hi = (lo + SEGMENT_LEN).min(limit + 1);
            for &p in base.iter().skip(1) {
                let p = p as u64;
                if p * p >= hi {
                    break;
                }
                let mut m = (p * p).max(lo.div_ceil(p) * p);
                if m % 2 == 0 {
                    m += p;
                }
                while m < hi {
                    let slot = &mut odd_lpf[(m / 2) as usize];
                    if *slot == 0 {
                        *slot = p as u16;
                    }
                    m += 2 * p;
                }
            }
            lo = hi;
        }

        let mut primes = vec![2u32];
        primes.extend(
            odd_lpf
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, &v)| v == 0)
                .map(|(i, _)| (2 * i + 1) as u32),
        );
        Ok(PrimeTable {
            limit,
            odd_lpf,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `p <= bound`, ascending.
    pub fn primes_up_to(&self, bound: u64) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as u64) <= bound);
        &self.primes[..end]
    }

    pub fn summary(&self) -> SieveSummary {
        SieveSummary {
            limit: self.limit,
            prime_count: self.primes.len(),
            largest_prime: self.primes.last().copied(),
        }
    }

    /// Table lookup of the least prime factor, `None` outside `2..=limit`.
    pub fn lpf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            return None;
        }
        if n % 2 == 0 {
            return Some(2);
        }
        match self.odd_lpf[(n / 2) as usize] {
            0 => Some(n),
            p => Some(p as u64),
        }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        match self.lpf(n) {
            Some(p) => p == n,
            None if n < 2 => false,
            None => primality::is_prime_u64(n),
        }
    }

    /// `P^-(n)`, the smallest prime dividing `n`.
    ///
    /// Beyond the table limit this trial-divides by the sieved primes and then
    /// falls back to a primality test and Pollard rho.
    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        if n < 2 {
            return Err(Error::Domain(format!("smallest prime factor of {n}")));
        }
        if let Some(p) = self.lpf(n) {
            return Ok(p);
        }
        for &p in &self.primes {
            let p = p as u64;
            if p.saturating_mul(p) > n {
                return Ok(n);
            }
            if n % p == 0 {
                return Ok(p);
            }
        }
        if primality::is_prime_u64(n) {
            return Ok(n);
        }
        Ok(primality::factorize_u64(n)[0].0)
    }

    /// Prime factorization with ascending primes.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 {
            return Err(Error::Domain("factorize(0)".into()));
        }
        if n > self.limit {
            return Ok(primality::factorize_u64(n));
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.lpf(m).expect("within table");
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
            m /= p;
        }
        Ok(out)
    }

    pub fn mobius(&self, n: u64) -> Result<i8> {
        Ok(super::multiplicative::mobius_from(&self.factorize(n)?))
    }

    pub fn euler_phi(&self, n: u64) -> Result<u64> {
        Ok(super::multiplicative::phi_from(&self.factorize(n)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_tables() {
        let t = PrimeTable::new(10).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        assert_eq!(t.lpf(9), Some(3));
        assert_eq!(t.lpf(10), Some(2));
        let t = PrimeTable::new(2).unwrap();
        assert_eq!(t.primes(), &[2]);
    }

    #[test]
    fn limit_out_of_range_is_capacity_error() {
        assert!(PrimeTable::new(1).unwrap_err().is_capacity());
        assert!(PrimeTable::new(MAX_SIEVE_LIMIT + 1)
            .unwrap_err()
            .is_capacity());
    }

    #[test]
    fn spans_several_segments() {
        let limit = 3 * SEGMENT_LEN + 12_345;
        let t = PrimeTable::new(limit).unwrap();
        let naive = simple_primes(limit);
        assert_eq!(t.primes(), naive.as_slice());
        for n in (2..limit).step_by(997) {
            let p = t.lpf(n).unwrap();
            assert_eq!(n % p, 0);
            assert!((2..p).take_while(|q| q * q <= p).all(|q| p % q != 0));
        }
    }

    #[test]
    fn spf_beyond_limit() {
        let t = PrimeTable::new(1000).unwrap();
        assert_eq!(t.smallest_prime_factor(2).unwrap(), 2);
        assert_eq!(t.smallest_prime_factor(35).unwrap(), 5);
        assert_eq!(
            t.smallest_prime_factor(1_000_000_007).unwrap(),
            1_000_000_007
        );
        // 1000003 * 1000033: both factors beyond the table.
        assert_eq!(
            t.smallest_prime_factor(1_000_003 * 1_000_033).unwrap(),
            1_000_003
        );
        assert!(t.smallest_prime_factor(1).is_err());
    }
}

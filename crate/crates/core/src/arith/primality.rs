//! Primality and factorization for integers beyond the sieve table.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub fn isqrt(n: u64) -> u64 {
    let mut r = ((n as f64).sqrt() as u64).min(u32::MAX as u64);
    while r * r > n {
        r -= 1;
    }
    while r < u32::MAX as u64 && (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all `u64` (the first twelve prime bases
/// suffice below 3.3e24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Brent's variant of Pollard rho; `n` must be an odd composite.
fn rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut r = 1u64;
        let mut ys = 2u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn push_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = rho(n);
    push_factors(d, out);
    push_factors(n / d, out);
}

fn collect(mut ps: Vec<u64>) -> Vec<(u64, u32)> {
    ps.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in ps {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Full factorization of `n >= 1` with ascending primes.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut ps = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            ps.push(p);
            n /= p;
        }
    }
    push_factors(n, &mut ps);
    collect(ps)
}

const BIG_BASES: [u32; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Miller-Rabin over arbitrary precision. Deterministic below 3.3e24, and a
/// 20-base strong probable-prime test above that.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in BIG_BASES {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return false;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = one.clone();
        while g == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn push_big(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if let Some(v) = n.to_u64() {
        for (p, e) in factorize_u64(v) {
            out.extend(std::iter::repeat_n(BigUint::from(p), e as usize));
        }
        return;
    }
    if is_prime_big(&n) {
        out.push(n);
        return;
    }
    let d = rho_big(&n);
    let rest = &n / &d;
    push_big(d, out);
    push_big(rest, out);
}

/// Full factorization of an arbitrary-precision `n >= 1`.
pub fn factorize_big(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut ps = Vec::new();
    let mut m = n.clone();
    for p in 2u32..1000 {
        if (2..p).take_while(|q| q * q <= p).any(|q| p % q == 0) {
            continue;
        }
        let bp = BigUint::from(p);
        while !m.is_zero() && (&m % &bp).is_zero() {
            ps.push(bp.clone());
            m /= &bp;
        }
    }
    push_big(m, &mut ps);
    ps.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in ps {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_primes_and_composites() {
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime_u64(1));
    }

    #[test]
    fn rho_splits_semiprimes() {
        let n = 4_294_967_291u64 * 4_294_967_279;
        assert_eq!(
            factorize_u64(n),
            vec![(4_294_967_279, 1), (4_294_967_291, 1)]
        );
        assert_eq!(factorize_u64(1), vec![]);
        assert_eq!(
            factorize_u64(2310),
            vec![(2, 1), (3, 1), (5, 1), (7, 1), (11, 1)]
        );
    }

    #[test]
    fn big_factorization() {
        let p = BigUint::from(1_000_000_007u64);
        let q = BigUint::from(998_244_353u64);
        let r = BigUint::from(1_000_000_009u64);
        let n = &p * &q * &r * BigUint::from(12u32);
        let f = factorize_big(&n);
        assert_eq!(f.len(), 5);
        assert_eq!(f[0], (BigUint::from(2u32), 2));
        let m89 = (BigUint::one() << 89usize) - BigUint::one();
        assert!(is_prime_big(&m89));
        assert!(!is_prime_big(&(&m89 * BigUint::from(3u32))));
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }
}

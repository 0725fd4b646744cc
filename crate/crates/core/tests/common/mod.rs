//! Brute-force oracles shared by the integration tests. They follow the
//! definitions directly and avoid the library's own algorithms.
#![allow(dead_code)]

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&m| is_prime(m)).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn mobius(n: u64) -> i64 {
    let (mut m, mut s) = (n, 1);
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            s = -s;
        }
        d += 1;
    }
    if m > 1 {
        s = -s;
    }
    s
}

pub fn phi(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..=n)
        .take_while(|d| d * d <= n)
        .filter(|d| n % d == 0)
        .collect();
    let big: Vec<u64> = v
        .iter()
        .rev()
        .map(|d| n / d)
        .filter(|&q| q * q != n)
        .collect();
    v.extend(big);
    v
}

/// A tuple is admissible iff for every prime `p` its residues miss a class.
pub fn admissible_by_definition(h: &[u64]) -> bool {
    let bound = h.len() as u64 + 1;
    primes_upto(bound.max(2)).into_iter().all(|p| {
        let mut seen = vec![false; p as usize];
        for &x in h {
            seen[(x % p) as usize] = true;
        }
        seen.iter().any(|s| !s)
    })
}

/// `|{b in [0, W) : gcd(b + h_i, W) = 1 for all i}|`.
pub fn x_w_count(h: &[u64], w: u64) -> u64 {
    (0..w)
        .filter(|&b| h.iter().all(|&x| gcd(b + x, w) == 1))
        .count() as u64
}

/// Composite trapezoid rule with `panels` intervals.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let inner: f64 = (1..panels).map(|i| f(a + i as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

/// `exp(1/(t^2-1))` on `|t| < 1`.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 / (t * t - 1.0)).exp()
    }
}

pub fn bump_derivative_sq(t: f64) -> f64 {
    if t.abs() >= 1.0 - 1e-9 {
        return 0.0;
    }
    let s = t * t - 1.0;
    ((1.0 / s).exp() * 2.0 * t / (s * s)).powi(2)
}

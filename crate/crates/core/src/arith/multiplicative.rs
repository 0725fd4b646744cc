use super::primality::factorize_u64;
use crate::error::{Error, Result};

fn positive(n: i64, what: &str) -> Result<u64> {
    if n <= 0 {
        return Err(Error::Domain(format!("{what}({n}) requires n >= 1")));
    }
    Ok(n as u64)
}

pub(crate) fn mobius_from(f: &[(u64, u32)]) -> i8 {
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn phi_from(f: &[(u64, u32)]) -> u64 {
    f.iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product()
}

pub fn factorize(n: i64) -> Result<Vec<(u64, u32)>> {
    Ok(factorize_u64(positive(n, "factorize")?))
}

pub fn mobius(n: i64) -> Result<i8> {
    Ok(mobius_from(&factorize(n)?))
}

pub fn euler_phi(n: i64) -> Result<u64> {
    Ok(phi_from(&factorize(n)?))
}

/// Product of the primes `p <= w`.
pub fn primorial(w: u64) -> Result<u64> {
    let mut acc: u64 = 1;
    for p in 2..=w {
        if super::primality::is_prime_u64(p) {
            acc = acc
                .checked_mul(p)
                .ok_or_else(|| Error::Capacity(format!("primorial({w}) overflows u64")))?;
        }
    }
    Ok(acc)
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize_u64(n).iter().all(|&(_, e)| e == 1)
}

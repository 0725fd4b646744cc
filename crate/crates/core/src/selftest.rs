//! Fast exact checks of the core routines against independent brute-force
//! computations, run by the `selftest` subcommand.

use num_rational::BigRational;
use serde::Serialize;

use crate::admissible::{enumerate_x_w, is_admissible, Tuple};
use crate::arith::{euler_phi, mobius, parse_polys, IntPolynomial, PrimeTable};
use crate::correlation::{euler_factor_ep, ZMatrix};
use crate::exec::Exec;
use crate::local_factors::{local_factor, LinearFormSystem};
use crate::progressions::{rescale_polys, search_in_a};
use crate::sieve_measure::CutoffFunction;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn naive_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn naive_mobius(n: u64) -> i8 {
    let (mut m, mut s) = (n, 1i8);
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

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check(name: &'static str, f: impl FnOnce() -> crate::Result<Option<String>>) -> CheckResult {
    match f() {
        Ok(None) => CheckResult {
            name,
            passed: true,
            detail: String::new(),
        },
        Ok(Some(why)) => CheckResult {
            name,
            passed: false,
            detail: why,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn run() -> Vec<CheckResult> {
    vec![
        check("sieve matches trial division to 10^4", || {
            let t = PrimeTable::new(10_000)?;
            Ok((2..=10_000u64)
                .find(|&n| t.is_prime(n) != naive_prime(n))
                .map(|n| format!("disagreement at {n}")))
        }),
        check("mobius and phi match definitions to 10^3", || {
            for n in 1..=1000u64 {
                let phi = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
                if mobius(n as i64)? != naive_mobius(n) || euler_phi(n as i64)? != phi {
                    return Ok(Some(format!("disagreement at {n}")));
                }
            }
            Ok(None)
        }),
        check("admissibility of small tuples", || {
            let ok = is_admissible(&Tuple::new(vec![0, 2, 6])?).is_admissible();
            let bad = is_admissible(&Tuple::new(vec![0, 2, 4])?).is_admissible();
            Ok((!ok || bad).then(|| "wrong verdict for {0,2,6} or {0,2,4}".into()))
        }),
        check("X_W of {0,2,6} modulo 30", || {
            let xw = enumerate_x_w(&Tuple::new(vec![0, 2, 6])?, 30)?;
            Ok((xw != vec![11, 17]).then(|| format!("got {xw:?}")))
        }),
        check("local factors of linear forms", || {
            let x = IntPolynomial::univariate(&[0, 1]);
            let x1 = IntPolynomial::univariate(&[1, 1]);
            let one = BigRational::from_integer(1.into());
            let fifth = BigRational::new(1.into(), 5.into());
            let ok = local_factor(&[], 5)? == one
                && local_factor(&[x.clone()], 5)? == fifth
                && local_factor(&[x, x1], 5)? == BigRational::from_integer(0.into());
            Ok((!ok).then(|| "unexpected density".into()))
        }),
        check("Euler factor is 1 at primes dividing W", || {
            let sys = LinearFormSystem::new(30, 11, vec![0, 1], vec![0, 2, 6])?;
            let z = ZMatrix::from_xi(&[0.5; 6], &[-0.25; 6], 3.0)?;
            for p in [2, 3, 5] {
                let e = euler_factor_ep(&sys, p, &z)?;
                if e.re != 1.0 || e.im != 0.0 {
                    return Ok(Some(format!("E_{p} = {e}")));
                }
            }
            Ok(None)
        }),
        check("cutoff normalization", || {
            let chi = CutoffFunction::normalize()?;
            Ok((chi.at_zero() <= 0.5).then(|| format!("chi(0) = {}", chi.at_zero())))
        }),
        check("polynomial rescaling and progression search", || {
            let q = rescale_polys(&parse_polys("y^2", &["y"])?, 6)?;
            if q != parse_polys("6*y^2", &["y"])? {
                return Ok(Some(format!("rescaled y^2 to {}", q[0])));
            }
            let primes: Vec<u64> = (2..=200).filter(|&n| naive_prime(n)).collect();
            let hits = search_in_a(
                &primes,
                &parse_polys("y^2,2*y^2", &["y"])?,
                100,
                10,
                Exec::Sequential,
            )?;
            Ok((!hits.iter().any(|h| h.x0 == 3 && h.y0 == 2)).then(|| "missing hit (3, 2)".into()))
        }),
    ]
}

//! Polynomials over F_p and univariate Euclid.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::poly::{IntPolynomial, Monomial};
use crate::error::{Error, Result};

/// Reduction of an [`IntPolynomial`] modulo a prime `p`. Coefficients lie in
/// `1..p`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPPolynomial {
    p: u64,
    nvars: usize,
    terms: BTreeMap<Monomial, u64>,
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue modulo a prime.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

impl ModPPolynomial {
    pub fn from_int(poly: &IntPolynomial, p: u64) -> Self {
        let bp = BigInt::from(p);
        let terms = poly
            .terms()
            .iter()
            .filter_map(|(e, c)| {
                let r = c.mod_floor(&bp).to_u64().expect("residue fits");
                (r != 0).then(|| (e.clone(), r))
            })
            .collect();
        ModPPolynomial {
            p,
            nvars: poly.nvars(),
            terms,
        }
    }

    /// Univariate polynomial from ascending coefficients (reduced mod p).
    pub fn from_dense(p: u64, coeffs: &[u64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c % p != 0).then(|| (vec![i as u32], c % p)))
            .collect();
        ModPPolynomial { p, nvars: 1, terms }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Lifts to integer coefficients in `0..p`.
    pub fn lift(&self) -> IntPolynomial {
        IntPolynomial::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|(e, &c)| (e.clone(), BigInt::from(c))),
        )
    }

    /// Evaluates at a point of `F_p^D`.
    pub fn eval(&self, point: &[u64]) -> u64 {
        debug_assert_eq!(point.len(), self.nvars);
        let p = self.p;
        self.terms.iter().fold(0u64, |acc, (e, &c)| {
            let t = e
                .iter()
                .zip(point)
                .fold(c, |t, (&k, &x)| mul_mod(t, pow_mod(x, k as u64, p), p));
            (acc + t) % p
        })
    }

    /// Dense ascending coefficients of a univariate polynomial.
    pub fn to_dense(&self) -> Result<Vec<u64>> {
        if self.nvars != 1 {
            return Err(Error::Unsupported(format!(
                "univariate operation on a polynomial in {} variables",
                self.nvars
            )));
        }
        let deg = self.degree().unwrap_or(0) as usize;
        let mut v = vec![0u64; deg + 1];
        for (e, &c) in &self.terms {
            v[e[0] as usize] = c;
        }
        trim(&mut v);
        Ok(v)
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn make_monic(v: &mut [u64], p: u64) {
    if let Some(&lead) = v.last() {
        let inv = inv_mod(lead, p);
        for c in v.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
}

/// Remainder of `a` by nonzero `b` in `F_p[x]`.
fn rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while a.len() > db {
        let shift = a.len() - 1 - db;
        let q = mul_mod(*a.last().unwrap(), inv, p);
        for (i, &bc) in b.iter().enumerate() {
            let t = mul_mod(q, bc, p);
            a[shift + i] = (a[shift + i] + p - t) % p;
        }
        trim(&mut a);
    }
    a
}

/// Monic gcd in `F_p[x]`. The gcd of zero and `b` is `b` made monic; the gcd of
/// two zero polynomials is zero.
pub fn mod_p_gcd(a: &ModPPolynomial, b: &ModPPolynomial) -> Result<ModPPolynomial> {
    if a.p != b.p {
        return Err(Error::Domain(format!("moduli differ: {} vs {}", a.p, b.p)));
    }
    let p = a.p;
    let mut x = a.to_dense()?;
    let mut y = b.to_dense()?;
    while !y.is_empty() {
        let r = rem(x, &y, p);
        x = y;
        y = r;
    }
    make_monic(&mut x, p);
    Ok(ModPPolynomial::from_dense(p, &x))
}

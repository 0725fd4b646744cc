//! Multivariate polynomials with arbitrary-precision integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modp::ModPPolynomial;
use crate::error::{Error, Result};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl IntPolynomial {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars >= 1, "polynomials need at least one variable");
        IntPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    /// The polynomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, 1)
    }

    pub fn monomial(nvars: usize, exps: Monomial, c: impl Into<BigInt>) -> Self {
        Self::from_terms(nvars, [(exps, c.into())])
    }

    /// Builds a polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(coeffs: &[i64]) -> Self {
        Self::from_terms(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (vec![i as u32], BigInt::from(c))),
        )
    }

    fn add_term(&mut self, e: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().unwrap_or(0) == 0
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn coefficient(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// Gcd of all coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn eval(&self, point: &[BigInt]) -> Result<BigInt> {
        if point.len() != self.nvars {
            return Err(Error::Domain(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars
            )));
        }
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_i64(&self, point: &[i64]) -> Result<BigInt> {
        let pt: Vec<BigInt> = point.iter().map(|&v| BigInt::from(v)).collect();
        self.eval(&pt)
    }

    /// Evaluation that must fit in `i64`.
    pub fn eval_to_i64(&self, point: &[i64]) -> Result<i64> {
        self.eval_i64(point)?
            .to_i64()
            .ok_or_else(|| Error::Capacity("polynomial value exceeds i64".into()))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| (e.clone(), c * k)),
        )
    }

    pub fn reduce_mod(&self, p: u64) -> ModPPolynomial {
        ModPPolynomial::from_int(self, p)
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
    }

    /// Renders with the given variable names.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let n = names.get(i).copied().unwrap_or("x");
                    if k == 1 {
                        n.to_string()
                    } else {
                        format!("{n}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                out.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    out.push_str(&a.to_string());
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = if self.nvars == 1 {
            vec!["y".into()]
        } else {
            (1..=self.nvars).map(|i| format!("x{i}")).collect()
        };
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.display_with(&refs))
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        self.scale(&BigInt::from(-1))
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        self.check_vars(rhs);
        let mut out = IntPolynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

/// Parses a comma-separated list of polynomials.
///
/// Grammar: terms `c*v^e` joined by `+`/`-`; a term is a `*`-product of
/// integers, variable names and `name^exponent` powers (`2y` is accepted as
/// shorthand for `2*y`).
pub fn parse_polys(src: &str, vars: &[&str]) -> Result<Vec<IntPolynomial>> {
    src.split(',').map(|s| parse_poly(s, vars)).collect()
}

pub fn parse_poly(src: &str, vars: &[&str]) -> Result<IntPolynomial> {
    let nvars = vars.len();
    if nvars == 0 {
        return Err(Error::Parse("no variable names given".into()));
    }
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let bytes = s.as_bytes();
    let mut poly = IntPolynomial::zero(nvars);
    let mut pos = 0;
    while pos < bytes.len() {
        let mut sign = 1;
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -1;
            }
            pos += 1;
        } else if pos != 0 {
            return Err(Error::Parse(format!(
                "expected '+' or '-' at {pos} in {s:?}"
            )));
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos] != b'+' && bytes[pos] != b'-' {
            pos += 1;
        }
        let term = &s[start..pos];
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let (exps, coeff) = parse_term(term, vars)?;
        poly.add_term(exps, coeff * sign);
    }
    Ok(poly)
}

fn parse_term(term: &str, vars: &[&str]) -> Result<(Monomial, BigInt)> {
    let mut exps = vec![0u32; vars.len()];
    let mut coeff = BigInt::one();
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {term:?}")));
        }
        let digits = factor.chars().take_while(|c| c.is_ascii_digit()).count();
        let (num, rest) = factor.split_at(digits);
        if !num.is_empty() {
            coeff *= num
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("{num:?}: {e}")))?;
        }
        if rest.is_empty() {
            continue;
        }
        let (name, exp) = match rest.split_once('^') {
            Some((n, e)) => (
                n,
                e.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?,
            ),
            None => (rest, 1),
        };
        let idx = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
        exps[idx] += exp;
    }
    Ok((exps, coeff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let p = parse_poly("y^2", &["y"]).unwrap();
        assert_eq!(p.eval_i64(&[7]).unwrap(), BigInt::from(49));
        // W*x + W*l with W = 6
        let q = parse_poly("6*x + 6*l", &["x", "l"]).unwrap();
        assert_eq!(q.eval_i64(&[2, 3]).unwrap(), BigInt::from(30));
        assert!(q.eval_i64(&[1]).is_err());
    }

    #[test]
    fn difference_of_shifted_forms_is_constant() {
        // (6(x+1)+1+0) - (6(x+3)+1+2)
        let a = parse_poly("6x+7", &["x"]).unwrap();
        let b = parse_poly("6x+21", &["x"]).unwrap();
        let d = &a - &b;
        assert!(d.is_constant());
        for x in [-5, 0, 3, 1000] {
            assert_eq!(d.eval_i64(&[x]).unwrap(), BigInt::from(-14));
        }
    }

    #[test]
    fn parser_grammar() {
        let ps = parse_polys("y^2,2*y^2, -y + 3 ,2y", &["y"]).unwrap();
        assert_eq!(ps[0], IntPolynomial::univariate(&[0, 0, 1]));
        assert_eq!(ps[1], IntPolynomial::univariate(&[0, 0, 2]));
        assert_eq!(ps[2], IntPolynomial::univariate(&[3, -1]));
        assert_eq!(ps[3], IntPolynomial::univariate(&[0, 2]));
        assert!(parse_poly("y^", &["y"]).is_err());
        assert!(parse_poly("z", &["y"]).is_err());
        assert!(parse_poly("y++1", &["y"]).is_err());
        assert_eq!(parse_poly("y - y", &["y"]).unwrap().degree(), None);
    }

    #[test]
    fn display_round_trips() {
        let p = parse_poly("-3*y^3 + y - 12", &["y"]).unwrap();
        assert_eq!(p.to_string(), "-3*y^3 + y - 12");
        assert_eq!(parse_poly(&p.to_string(), &["y"]).unwrap(), p);
    }

    #[test]
    fn arithmetic() {
        let a = IntPolynomial::univariate(&[1, 1]);
        let b = IntPolynomial::univariate(&[-1, 1]);
        assert_eq!(&a * &b, IntPolynomial::univariate(&[-1, 0, 1]));
        assert_eq!((&a - &a).degree(), None);
        assert_eq!(
            IntPolynomial::univariate(&[6, 12, 18]).content(),
            BigInt::from(6)
        );
    }
}

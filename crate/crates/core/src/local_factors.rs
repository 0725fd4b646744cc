//! Local densities of polynomial systems over `F_p`, the good/bad/terrible
//! classification of primes, and divisibility densities over `Z_M`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::modp::{mod_p_gcd, ModPPolynomial};
use crate::arith::primality::factorize_u64;
use crate::arith::IntPolynomial;
use crate::error::{Error, Result};
use crate::wtrick::SieveContext;

/// Largest number of points `p^D` that [`local_factor`] will enumerate.
pub const LOCAL_FACTOR_CAP: u64 = 10_000_000;
/// Largest modulus accepted by [`alpha_density`].
pub const ALPHA_LCM_CAP: u64 = 1_000_000_000;
/// Subsets sampled per prime when the system is too large to enumerate.
pub const SAMPLED_SUBSETS: usize = 100;
/// Systems with at most this many forms have every subset checked.
pub const FULL_ENUMERATION_FORMS: usize = 10;

/// The `kJ` forms `W(x + r_j) + b + h_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearFormSystem {
    pub w_mod: u64,
    pub b: u64,
    pub shifts: Vec<i64>,
    pub offsets: Vec<u64>,
}

impl LinearFormSystem {
    pub fn new(w_mod: u64, b: u64, shifts: Vec<i64>, offsets: Vec<u64>) -> Result<Self> {
        if w_mod == 0 {
            return Err(Error::Domain("W must be positive".into()));
        }
        if shifts.is_empty() || offsets.is_empty() {
            return Err(Error::Domain(
                "a system needs at least one shift and one offset".into(),
            ));
        }
        Ok(LinearFormSystem {
            w_mod,
            b,
            shifts,
            offsets,
        })
    }

    pub fn from_context(ctx: &SieveContext, shifts: Vec<i64>) -> Result<Self> {
        Self::new(
            ctx.w_mod,
            ctx.b,
            shifts,
            ctx.params.tuple.as_slice().to_vec(),
        )
    }

    /// Number of forms, `kJ`.
    pub fn len(&self) -> usize {
        self.shifts.len() * self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index pairs `(i, j)` in the order used by every per-form array.
    pub fn indices(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::with_capacity(self.len());
        for j in 0..self.shifts.len() {
            for i in 0..self.offsets.len() {
                v.push((i, j));
            }
        }
        v
    }

    /// Constant term `W r_j + b + h_i` of each form.
    pub fn constants(&self) -> Vec<i128> {
        self.indices()
            .into_iter()
            .map(|(i, j)| {
                self.w_mod as i128 * self.shifts[j] as i128
                    + self.b as i128
                    + self.offsets[i] as i128
            })
            .collect()
    }

    pub fn forms(&self) -> Vec<IntPolynomial> {
        self.constants()
            .into_iter()
            .map(|c| {
                IntPolynomial::from_terms(
                    1,
                    [
                        (vec![1], BigInt::from(self.w_mod)),
                        (vec![0], BigInt::from(c)),
                    ],
                )
            })
            .collect()
    }

    /// Largest prime dividing `W` (1 when `W = 1`).
    pub fn small_prime_bound(&self) -> u64 {
        factorize_u64(self.w_mod).last().map_or(1, |&(p, _)| p)
    }

    /// Reads `key = values` lines (`W`, `b`, `r`, `h`); `#` starts a comment.
    pub fn parse(src: &str) -> Result<Self> {
        let mut fields: BTreeMap<String, Vec<i64>> = BTreeMap::new();
        for (n, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, vals) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = values", n + 1)))?;
            let vals = vals
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<i64>()
                        .map_err(|e| Error::Parse(format!("line {}: {s:?}: {e}", n + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            fields.insert(key.trim().to_string(), vals);
        }
        let scalar = |k: &str| -> Result<i64> {
            match fields.get(k).map(Vec::as_slice) {
                Some([v]) => Ok(*v),
                _ => Err(Error::Parse(format!("expected exactly one value for {k}"))),
            }
        };
        let nonneg = |v: i64, what: &str| -> Result<u64> {
            u64::try_from(v).map_err(|_| Error::Parse(format!("{what} must be non-negative")))
        };
        let w_mod = nonneg(scalar("W")?, "W")?;
        let b = nonneg(scalar("b")?, "b")?;
        let shifts = fields.get("r").cloned().unwrap_or_else(|| vec![0]);
        let offsets = fields
            .get("h")
            .ok_or_else(|| Error::Parse("missing h".into()))?
            .iter()
            .map(|&v| nonneg(v, "h"))
            .collect::<Result<Vec<_>>>()?;
        Self::new(w_mod, b, shifts, offsets)
    }
}

/// Why a prime fails to be good. Form indices refer to the input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    Vanishes { form: usize },
    CommonFactor { first: usize, second: usize },
    NotLinear { form: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PrimeClass {
    Good,
    Bad {
        obstruction: Obstruction,
    },
    Terrible {
        obstruction: Obstruction,
    },
    /// `p | W`: every form of a linear system is constant modulo `p`.
    DegenerateSmallPrime,
}

impl PrimeClass {
    /// Terrible primes count as bad.
    pub fn is_bad(&self) -> bool {
        matches!(self, PrimeClass::Bad { .. } | PrimeClass::Terrible { .. })
    }

    pub fn is_good(&self) -> bool {
        matches!(self, PrimeClass::Good)
    }

    pub fn is_terrible(&self) -> bool {
        matches!(self, PrimeClass::Terrible { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            PrimeClass::Good => "good",
            PrimeClass::Bad { .. } => "bad",
            PrimeClass::Terrible { .. } => "terrible",
            PrimeClass::DegenerateSmallPrime => "degenerate",
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(())
}

fn n_points(nvars: usize, p: u64) -> Result<u64> {
    let mut total = 1u64;
    for _ in 0..nvars {
        total = total
            .checked_mul(p)
            .filter(|&t| t <= LOCAL_FACTOR_CAP)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "{p}^{nvars} points exceed the enumeration cap {LOCAL_FACTOR_CAP}"
                ))
            })?;
    }
    Ok(total)
}

/// Fraction of `x in F_p^D` at which every polynomial vanishes mod `p`.
pub fn local_factor(polys: &[IntPolynomial], p: u64) -> Result<BigRational> {
    check_prime(p)?;
    if polys.is_empty() {
        return Ok(BigRational::one());
    }
    let d = polys.iter().map(IntPolynomial::nvars).max().unwrap_or(0);
    let total = n_points(d, p)?;
    let reduced: Vec<ModPPolynomial> = polys.iter().map(|q| q.reduce_mod(p)).collect();
    let mut point = vec![0u64; d];
    let mut count = 0u64;
    for idx in 0..total {
        let mut rest = idx;
        for c in point.iter_mut() {
            *c = rest % p;
            rest /= p;
        }
        if reduced.iter().all(|q| q.eval(&point[..q.nvars()]) == 0) {
            count += 1;
        }
    }
    Ok(BigRational::new(count.into(), total.into()))
}

/// Classifies `p` for univariate polynomials.
pub fn classify_prime(polys: &[IntPolynomial], p: u64) -> Result<PrimeClass> {
    check_prime(p)?;
    if let Some(q) = polys.iter().find(|q| q.nvars() > 1) {
        return Err(Error::Unsupported(format!(
            "good-prime classification of a polynomial in {} variables",
            q.nvars()
        )));
    }
    let reduced: Vec<ModPPolynomial> = polys
        .iter()
        .map(|q| ModPPolynomial::from_dense(p, &dense_residues(q, p)))
        .collect();
    if let Some(form) = reduced.iter().position(ModPPolynomial::is_zero) {
        return Ok(PrimeClass::Terrible {
            obstruction: Obstruction::Vanishes { form },
        });
    }
    for a in 0..reduced.len() {
        for b in a + 1..reduced.len() {
            let g = mod_p_gcd(&reduced[a], &reduced[b])?;
            if g.degree().unwrap_or(0) > 0 {
                return Ok(PrimeClass::Bad {
                    obstruction: Obstruction::CommonFactor {
                        first: a,
                        second: b,
                    },
                });
            }
        }
    }
    // With one variable the linear part and the constant part are elements of
    // F_p; a nonzero linear coefficient is a unit, so linearity is the whole test.
    if let Some(form) = reduced.iter().position(|q| q.degree() != Some(1)) {
        return Ok(PrimeClass::Bad {
            obstruction: Obstruction::NotLinear { form },
        });
    }
    Ok(PrimeClass::Good)
}

fn dense_residues(q: &IntPolynomial, p: u64) -> Vec<u64> {
    let m = q.reduce_mod(p);
    let deg = m.degree().unwrap_or(0) as usize;
    let mut v = vec![0u64; deg + 1];
    for (e, &c) in m.terms() {
        v[e.first().copied().unwrap_or(0) as usize] = c;
    }
    v
}

/// Classification of `p` for a linear system; primes dividing `W` are reported
/// as degenerate.
pub fn classify_system(sys: &LinearFormSystem, p: u64) -> Result<PrimeClass> {
    check_prime(p)?;
    if sys.w_mod % p == 0 {
        return Ok(PrimeClass::DegenerateSmallPrime);
    }
    classify_prime(&sys.forms(), p)
}

/// Exact `c_p` of the forms selected by `mask` (bit `t` selects form `t` in
/// [`LinearFormSystem::indices`] order).
///
/// For `p` not dividing `W` every form has exactly one root, so the selected
/// forms share a root iff their constants agree mod `p`. For `p | W` the
/// forms are constants, vanishing everywhere or nowhere.
pub fn linear_local_factor(constants: &[i128], w_mod: u64, mask: u64, p: u64) -> BigRational {
    let selected: Vec<i128> = constants
        .iter()
        .enumerate()
        .filter(|(t, _)| mask >> t & 1 == 1)
        .map(|(_, &c)| c.rem_euclid(p as i128))
        .collect();
    if selected.is_empty() {
        return BigRational::one();
    }
    if w_mod % p == 0 {
        return if selected.iter().all(|&c| c == 0) {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    if selected.iter().all(|&c| c == selected[0]) {
        BigRational::new(BigInt::one(), BigInt::from(p))
    } else {
        BigRational::zero()
    }
}

/// Primes above the small-prime bound dividing a pairwise difference of constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadPrimeSet {
    pub primes: Vec<u64>,
    /// Pairs of forms that coincide; such systems are bad at every prime.
    pub degenerate_pairs: Vec<(usize, usize)>,
    pub limit: u64,
}

impl BadPrimeSet {
    pub fn is_bad(&self, p: u64) -> bool {
        !self.degenerate_pairs.is_empty() || self.primes.binary_search(&p).is_ok()
    }

    /// `sum 1/p` over the listed primes, in increasing order of `p`.
    pub fn reciprocal_sum(&self) -> f64 {
        self.primes.iter().map(|&p| 1.0 / p as f64).sum()
    }
}

/// Bad primes `p` in `(w, limit]` of a linear system, where `w` is the largest
/// prime factor of `W`.
pub fn bad_primes_linear(sys: &LinearFormSystem, limit: u64) -> Result<BadPrimeSet> {
    let w = sys.small_prime_bound();
    let cs = sys.constants();
    let mut primes = Vec::new();
    let mut degenerate_pairs = Vec::new();
    for a in 0..cs.len() {
        for b in a + 1..cs.len() {
            let diff = (cs[a] - cs[b]).unsigned_abs();
            if diff == 0 {
                degenerate_pairs.push((a, b));
                continue;
            }
            let diff = u64::try_from(diff)
                .map_err(|_| Error::Capacity(format!("difference {diff} exceeds 64 bits")))?;
            primes.extend(
                factorize_u64(diff)
                    .into_iter()
                    .map(|(p, _)| p)
                    .filter(|&p| p > w && p <= limit),
            );
        }
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(BadPrimeSet {
        primes,
        degenerate_pairs,
        limit,
    })
}

/// `sum 1/p` over [`bad_primes_linear`].
pub fn bad_prime_sum(sys: &LinearFormSystem, limit: u64) -> Result<f64> {
    Ok(bad_primes_linear(sys, limit)?.reciprocal_sum())
}

/// The condition `modulus | a*y + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisibilityConstraint {
    pub modulus: u64,
    pub a: i64,
    pub c: i64,
}

/// Density of `y in Z_M` satisfying every constraint, `M` the lcm of the
/// moduli, computed prime by prime and multiplied.
pub fn alpha_density(constraints: &[DivisibilityConstraint]) -> Result<BigRational> {
    let mut lcm = 1u64;
    for con in constraints {
        if con.modulus == 0 {
            return Err(Error::Domain("modulus 0".into()));
        }
        lcm = lcm
            .checked_mul(con.modulus / lcm.gcd(&con.modulus))
            .filter(|&l| l <= ALPHA_LCM_CAP)
            .ok_or_else(|| Error::Capacity(format!("lcm of moduli exceeds {ALPHA_LCM_CAP}")))?;
    }
    let mut density = BigRational::one();
    for (p, _) in factorize_u64(lcm) {
        density *= prime_power_density(constraints, p);
        if density.is_zero() {
            break;
        }
    }
    Ok(density)
}

/// Density contributed at `p`: each constraint `p^e | a y + c` is a coset
/// `y = y0 (mod p^f)` or empty; cosets modulo powers of one prime intersect
/// in the finest one when they are nested.
fn prime_power_density(constraints: &[DivisibilityConstraint], p: u64) -> BigRational {
    // (modulus p^f, representative)
    let mut coset: (u64, u64) = (1, 0);
    for con in constraints {
        let mut e = 0u32;
        let mut m = con.modulus;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e == 0 {
            continue;
        }
        let pe = p.pow(e);
        let a = con.a.rem_euclid(pe as i64) as u64;
        let c = con.c.rem_euclid(pe as i64) as u64;
        let g = a.gcd(&pe);
        // a*y = -c (mod p^e): solvable iff g | c.
        let neg_c = (pe - c) % pe;
        if neg_c % g != 0 {
            return BigRational::zero();
        }
        let modulus = pe / g;
        let y0 = if modulus == 1 {
            0
        } else {
            let a_red = (a / g) % modulus;
            let rhs = (neg_c / g) % modulus;
            (rhs as u128 * inverse_mod(a_red, modulus) as u128 % modulus as u128) as u64
        };
        let (fine, coarse) = if modulus >= coset.0 {
            ((modulus, y0), coset)
        } else {
            (coset, (modulus, y0))
        };
        if fine.1 % coarse.0 != coarse.1 % coarse.0 {
            return BigRational::zero();
        }
        coset = fine;
    }
    BigRational::new(BigInt::one(), BigInt::from(coset.0))
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// Root sets of univariate polynomials modulo `p`, for fast `c_p` of subsets.
struct RootTable {
    p: u64,
    /// `None` means the polynomial vanishes identically.
    roots: Vec<Option<Vec<u64>>>,
}

impl RootTable {
    fn new(polys: &[IntPolynomial], p: u64) -> Result<Self> {
        n_points(1, p)?;
        let roots = polys
            .iter()
            .map(|q| {
                let m = q.reduce_mod(p);
                if m.is_zero() {
                    None
                } else {
                    Some((0..p).filter(|&x| m.eval(&[x]) == 0).collect())
                }
            })
            .collect();
        Ok(RootTable { p, roots })
    }

    fn c_p(&self, subset: &[usize]) -> BigRational {
        let mut common: Option<Vec<u64>> = None;
        for &t in subset {
            if let Some(r) = &self.roots[t] {
                common = Some(match common {
                    None => r.clone(),
                    Some(c) => c
                        .into_iter()
                        .filter(|x| r.binary_search(x).is_ok())
                        .collect(),
                });
            }
        }
        let count = common.map_or(self.p, |c| c.len() as u64);
        BigRational::new(count.into(), self.p.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeEstimate {
    pub p: u64,
    pub class: PrimeClass,
    pub subsets: usize,
    /// `max p * c_p` over non-empty subsets (non-terrible `p`).
    pub max_p_cp: Option<f64>,
    /// `max p^2 |c_p - 1/p|` over singletons (good `p`).
    pub max_p2_singleton_dev: Option<f64>,
    /// `max p^2 c_p` over subsets of size at least 2 (good `p`).
    pub max_p2_cp_multi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalEstimatesReport {
    pub seed: u64,
    pub empty_subset_exact: bool,
    pub per_prime: Vec<PrimeEstimate>,
    pub max_p_cp: f64,
    pub max_p2_singleton_dev: f64,
    pub max_p2_cp_multi: f64,
}

impl LocalEstimatesReport {
    /// The empty product is exactly 1 and every measured constant is finite.
    pub fn bounded(&self) -> bool {
        self.empty_subset_exact
            && [
                self.max_p_cp,
                self.max_p2_singleton_dev,
                self.max_p2_cp_multi,
            ]
            .iter()
            .all(|v| v.is_finite())
    }
}

fn subsets_for(n: usize, p: u64, seed: u64) -> Vec<Vec<usize>> {
    if n <= FULL_ENUMERATION_FORMS {
        return (1u64..1 << n)
            .map(|m| (0..n).filter(|t| m >> t & 1 == 1).collect())
            .collect();
    }
    let mut out: Vec<Vec<usize>> = (0..n).map(|t| vec![t]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.rotate_left(17));
    let all: Vec<usize> = (0..n).collect();
    for s in 0..SAMPLED_SUBSETS {
        let size = 2 + s % 2;
        let mut pick: Vec<usize> = all.choose_multiple(&mut rng, size).copied().collect();
        pick.sort_unstable();
        out.push(pick);
    }
    out
}

fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Measures the constants in the local estimates `c_p(empty) = 1`,
/// `c_p = O(1/p)`, `c_p = 1/p + O(1/p^2)` for singletons and `O(1/p^2)` for
/// larger subsets, over the given primes.
pub fn verify_local_estimates(
    sys: &LinearFormSystem,
    primes: &[u64],
    seed: u64,
) -> Result<LocalEstimatesReport> {
    let forms = sys.forms();
    let mut per_prime = Vec::with_capacity(primes.len());
    let mut empty_subset_exact = true;
    for &p in primes {
        let class = classify_system(sys, p)?;
        empty_subset_exact &= local_factor(&[], p)?.is_one();
        let table = RootTable::new(&forms, p)?;
        let subsets = subsets_for(forms.len(), p, seed);
        let pf = p as f64;
        let inv_p = BigRational::new(BigInt::one(), BigInt::from(p));
        let (mut a, mut b, mut c) = (None::<f64>, None::<f64>, None::<f64>);
        let upd = |slot: &mut Option<f64>, v: f64| *slot = Some(slot.map_or(v, |s| s.max(v)));
        for s in &subsets {
            let cp = table.c_p(s);
            if !class.is_terrible() && class != PrimeClass::DegenerateSmallPrime {
                upd(&mut a, pf * to_f64(&cp));
            }
            if class.is_good() {
                if s.len() == 1 {
                    upd(&mut b, pf * pf * to_f64(&(&cp - &inv_p).abs()));
                } else {
                    upd(&mut c, pf * pf * to_f64(&cp));
                }
            }
        }
        per_prime.push(PrimeEstimate {
            p,
            class,
            subsets: subsets.len(),
            max_p_cp: a,
            max_p2_singleton_dev: b,
            max_p2_cp_multi: c,
        });
    }
    let fold =
        |f: fn(&PrimeEstimate) -> Option<f64>| per_prime.iter().filter_map(f).fold(0.0, f64::max);
    Ok(LocalEstimatesReport {
        seed,
        empty_subset_exact,
        max_p_cp: fold(|e| e.max_p_cp),
        max_p2_singleton_dev: fold(|e| e.max_p2_singleton_dev),
        max_p2_cp_multi: fold(|e| e.max_p2_cp_multi),
        per_prime,
    })
}

/// One CSV-ready row: `p`, its class, and `c_p` of the full system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalFactorRow {
    pub p: u64,
    pub class: String,
    pub numerator: String,
    pub denominator: String,
}

pub fn local_factor_rows(sys: &LinearFormSystem, primes: &[u64]) -> Result<Vec<LocalFactorRow>> {
    let cs = sys.constants();
    let full = if cs.len() >= 64 {
        u64::MAX
    } else {
        (1u64 << cs.len()) - 1
    };
    primes
        .iter()
        .map(|&p| {
            let class = classify_system(sys, p)?;
            let cp = linear_local_factor(&cs, sys.w_mod, full, p);
            Ok(LocalFactorRow {
                p,
                class: class.label().to_string(),
                numerator: cp.numer().to_string(),
                denominator: cp.denom().to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(c: &[i64]) -> IntPolynomial {
        IntPolynomial::univariate(c)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn local_factor_examples() {
        assert_eq!(local_factor(&[], 13).unwrap(), q(1, 1));
        assert_eq!(local_factor(&[lin(&[0, 1])], 5).unwrap(), q(1, 5));
        assert_eq!(
            local_factor(&[lin(&[0, 1]), lin(&[1, 1])], 5).unwrap(),
            q(0, 1)
        );
        // x^2 - 1 over F_7 has two roots.
        assert_eq!(local_factor(&[lin(&[-1, 0, 1])], 7).unwrap(), q(2, 7));
        assert!(local_factor(&[lin(&[0, 1])], 6).is_err());
    }

    #[test]
    fn local_factor_two_variables() {
        let x = IntPolynomial::var(2, 0);
        let y = IntPolynomial::var(2, 1);
        // x*y = 0 over F_3: 5 of 9 points.
        assert_eq!(local_factor(&[&x * &y], 3).unwrap(), q(5, 9));
        assert!(matches!(
            local_factor(&[x], 10_007),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify_prime(&[lin(&[0, 1]), lin(&[1, 1])], 7).unwrap(),
            PrimeClass::Good
        );
        let c = classify_prime(&[lin(&[0, 1]), lin(&[7, 1])], 7).unwrap();
        assert_eq!(
            c,
            PrimeClass::Bad {
                obstruction: Obstruction::CommonFactor {
                    first: 0,
                    second: 1
                }
            }
        );
        let c = classify_prime(&[lin(&[7, 7])], 7).unwrap();
        assert!(c.is_terrible() && c.is_bad());
        let c = classify_prime(&[lin(&[1, 0, 1])], 7).unwrap();
        assert_eq!(
            c,
            PrimeClass::Bad {
                obstruction: Obstruction::NotLinear { form: 0 }
            }
        );
        let xy = IntPolynomial::var(2, 0);
        assert!(matches!(
            classify_prime(&[xy], 7),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn bad_primes_of_small_systems() {
        let sys = LinearFormSystem::new(2, 1, vec![0, 5], vec![0]).unwrap();
        let bad = bad_primes_linear(&sys, 100).unwrap();
        assert_eq!(bad.primes, vec![5]);
        assert!((bad.reciprocal_sum() - 0.2).abs() < 1e-15);
        let sys = LinearFormSystem::new(30, 7, vec![0], vec![0, 2, 6]).unwrap();
        assert!(bad_primes_linear(&sys, 1000).unwrap().primes.is_empty());
        let sys = LinearFormSystem::new(2, 1, vec![0, 0], vec![0]).unwrap();
        assert_eq!(
            bad_primes_linear(&sys, 10).unwrap().degenerate_pairs,
            vec![(0, 1)]
        );
    }

    #[test]
    fn linear_factor_matches_enumeration() {
        let sys = LinearFormSystem::new(6, 5, vec![0, 3, -2], vec![0, 2]).unwrap();
        let cs = sys.constants();
        let forms = sys.forms();
        for p in [2u64, 3, 5, 7, 11, 13] {
            for mask in 0u64..1 << forms.len() {
                let sel: Vec<IntPolynomial> = (0..forms.len())
                    .filter(|t| mask >> t & 1 == 1)
                    .map(|t| forms[t].clone())
                    .collect();
                assert_eq!(
                    linear_local_factor(&cs, sys.w_mod, mask, p),
                    local_factor(&sel, p).unwrap(),
                    "p = {p}, mask = {mask:b}"
                );
            }
        }
    }

    #[test]
    fn alpha_examples() {
        let con = |modulus, a, c| DivisibilityConstraint { modulus, a, c };
        assert_eq!(alpha_density(&[con(12, 1, 5)]).unwrap(), q(1, 12));
        assert_eq!(
            alpha_density(&[con(2, 1, 0), con(2, 1, 1)]).unwrap(),
            q(0, 1)
        );
        // 4 | 2y + 2 iff y odd.
        assert_eq!(alpha_density(&[con(4, 2, 2)]).unwrap(), q(1, 2));
        assert_eq!(alpha_density(&[]).unwrap(), q(1, 1));
        assert!(alpha_density(&[con(1 << 31, 1, 0), con(3u64.pow(19), 1, 0)]).is_err());
    }

    #[test]
    fn parse_forms_file() {
        let sys = LinearFormSystem::parse("# demo\nW = 2\nb = 1\nr = 0 5\nh = 0\n").unwrap();
        assert_eq!(
            sys,
            LinearFormSystem::new(2, 1, vec![0, 5], vec![0]).unwrap()
        );
        assert!(LinearFormSystem::parse("W = 2\nb = 1").is_err());
        assert!(LinearFormSystem::parse("W 2").is_err());
    }

    #[test]
    fn local_estimates_of_a_good_system() {
        let sys = LinearFormSystem::new(6, 5, vec![0, 1], vec![0, 2]).unwrap();
        let primes = [2u64, 3, 5, 7, 11, 13, 101];
        let r = verify_local_estimates(&sys, &primes, 0).unwrap();
        assert!(r.bounded());
        for e in &r.per_prime {
            if e.class.is_good() {
                assert_eq!(e.max_p2_singleton_dev, Some(0.0));
                assert_eq!(e.max_p2_cp_multi, Some(0.0));
            }
        }
        assert_eq!(r.per_prime[0].class, PrimeClass::DegenerateSmallPrime);
    }

    #[test]
    fn large_systems_are_sampled() {
        let sys = LinearFormSystem::new(2, 1, (0..4).collect(), vec![0, 2, 6]).unwrap();
        let a = verify_local_estimates(&sys, &[101], 7).unwrap();
        let b = verify_local_estimates(&sys, &[101], 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_prime[0].subsets, 12 + SAMPLED_SUBSETS);
    }
}

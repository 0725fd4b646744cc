//! Correlations of the majorant along shifts and polynomial shift families,
//! the Euler factors of the correlation sum, and their product over primes.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{IntPolynomial, PrimeTable};
use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Exec};
use crate::local_factors::{bad_primes_linear, linear_local_factor, LinearFormSystem};
use crate::sieve_measure::NuEvaluator;

/// Largest `kJ` for which [`euler_factor_ep`] sums all `4^{kJ}` terms.
pub const MAX_EP_FORMS: usize = 8;
/// Checkpoints for the Euler-product experiment.
pub const EULER_CHECKPOINTS: [u64; 4] = [100, 1_000, 10_000, 100_000];
/// Upper bound on `H^d * N` for [`polynomial_forms_average`].
pub const POLY_FORMS_BUDGET: u128 = 20_000_000_000;
/// Bad primes are collected up to `min(R^{log R}, this)`.
pub const BAD_PRIME_LIMIT_CAP: u64 = 1 << 62;

/// Values `z_t = (1 + i xi_t)/log R` and `z'_t`, one pair per form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZMatrix {
    pub z: Vec<Complex64>,
    pub z_prime: Vec<Complex64>,
}

impl ZMatrix {
    pub fn from_xi(xi: &[f64], xi_prime: &[f64], log_r: f64) -> Result<Self> {
        if xi.len() != xi_prime.len() {
            return Err(Error::Domain("xi and xi' differ in length".into()));
        }
        if !(log_r > 0.0 && log_r.is_finite()) {
            return Err(Error::Domain(format!("log R = {log_r} must be positive")));
        }
        let z = |x: &f64| Complex64::new(1.0, *x) / log_r;
        Ok(ZMatrix {
            z: xi.iter().map(z).collect(),
            z_prime: xi_prime.iter().map(z).collect(),
        })
    }

    /// All frequencies zero: `z_t = z'_t = 1/log R`.
    pub fn real(forms: usize, log_r: f64) -> Result<Self> {
        Self::from_xi(&vec![0.0; forms], &vec![0.0; forms], log_r)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

fn p_pow_neg(p: u64, z: Complex64) -> Complex64 {
    (-z * (p as f64).ln()).exp()
}

fn check_forms(sys: &LinearFormSystem, z: &ZMatrix) -> Result<usize> {
    let n = sys.len();
    if z.len() != n {
        return Err(Error::Domain(format!("{} z-values for {n} forms", z.len())));
    }
    Ok(n)
}

/// The Euler factor `E_p`, summed over all `m_t, m'_t in {1, p}`.
pub fn euler_factor_ep(sys: &LinearFormSystem, p: u64, z: &ZMatrix) -> Result<Complex64> {
    let n = check_forms(sys, z)?;
    if n > MAX_EP_FORMS {
        return Err(Error::Capacity(format!(
            "E_p over {n} forms exceeds the cap of {MAX_EP_FORMS}"
        )));
    }
    let consts = sys.constants();
    let pz: Vec<Complex64> = z.z.iter().map(|&s| p_pow_neg(p, s)).collect();
    let pzp: Vec<Complex64> = z.z_prime.iter().map(|&s| p_pow_neg(p, s)).collect();
    let mut c_p: HashMap<u64, f64> = HashMap::new();
    let mut total = Complex64::zero();
    for m in 0u64..1 << n {
        for mp in 0u64..1 << n {
            let active = m | mp;
            let c = *c_p.entry(active).or_insert_with(|| {
                linear_local_factor(&consts, sys.w_mod, active, p)
                    .to_f64()
                    .unwrap_or(f64::NAN)
            });
            if c == 0.0 {
                continue;
            }
            let mut term = Complex64::new(c, 0.0);
            for t in 0..n {
                if m >> t & 1 == 1 {
                    term *= -pz[t];
                }
                if mp >> t & 1 == 1 {
                    term *= -pzp[t];
                }
            }
            total += term;
        }
    }
    Ok(total)
}

/// `prod_t (1 - p^{-1-z_t})(1 - p^{-1-z'_t}) / (1 - p^{-1-z_t-z'_t})`.
pub fn euler_factor_ep_prime(p: u64, z: &ZMatrix) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    z.z.iter().zip(&z.z_prime).fold(one, |acc, (&a, &b)| {
        acc * (one - p_pow_neg(p, one + a)) * (one - p_pow_neg(p, one + b))
            / (one - p_pow_neg(p, one + a + b))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerCheckpoint {
    pub limit: u64,
    /// `prod_{p <= limit} E_p / E'_p` as `[re, im]`.
    pub product: [f64; 2],
    /// `|product| / (W/phi(W))^{kJ}`.
    pub ratio_to_target: f64,
    /// `sum 1/p` over bad primes up to `limit`.
    pub bad_prime_correction: f64,
    /// `|product - previous product|`.
    pub difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerProductReport {
    pub target: f64,
    pub checkpoints: Vec<EulerCheckpoint>,
    pub differences_decreasing: bool,
    pub bounded: bool,
}

/// `prod_{p <= P} E_p / E'_p` at each checkpoint `P`.
pub fn euler_product_experiment(
    sys: &LinearFormSystem,
    z: &ZMatrix,
    checkpoints: &[u64],
) -> Result<EulerProductReport> {
    let n = check_forms(sys, z)?;
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let top = *cps
        .last()
        .ok_or_else(|| Error::Domain("no checkpoints".into()))?;
    let table = PrimeTable::new(top.max(2))?;
    let phi = crate::arith::euler_phi(sys.w_mod as i64)?;
    let target = (sys.w_mod as f64 / phi as f64).powi(n as i32);
    let bad = bad_primes_linear(sys, top)?;

    let mut product = Complex64::new(1.0, 0.0);
    let mut primes = table.primes().iter().map(|&p| p as u64).peekable();
    let mut out: Vec<EulerCheckpoint> = Vec::with_capacity(cps.len());
    for &limit in &cps {
        while let Some(p) = primes.next_if(|&p| p <= limit) {
            product *= euler_factor_ep(sys, p, z)? / euler_factor_ep_prime(p, z);
        }
        let difference = out
            .last()
            .map(|prev| (product - Complex64::new(prev.product[0], prev.product[1])).norm());
        out.push(EulerCheckpoint {
            limit,
            product: [product.re, product.im],
            ratio_to_target: product.norm() / target,
            bad_prime_correction: bad
                .primes
                .iter()
                .take_while(|&&p| p <= limit)
                .map(|&p| 1.0 / p as f64)
                .sum(),
            difference,
        });
    }
    let diffs: Vec<f64> = out.iter().filter_map(|c| c.difference).collect();
    let differences_decreasing = diffs.windows(2).all(|w| w[1] < w[0]);
    let bounded = out.iter().all(|c| c.ratio_to_target.is_finite());
    Ok(EulerProductReport {
        target,
        checkpoints: out,
        differences_decreasing,
        bounded,
    })
}

/// `min(R^{log R}, cap)`: the range of primes whose badness matters.
pub fn bad_prime_limit(r: f64) -> u64 {
    let e = r.ln() * r.ln();
    if e >= (BAD_PRIME_LIMIT_CAP as f64).ln() {
        BAD_PRIME_LIMIT_CAP
    } else {
        e.exp().floor() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub shifts: Vec<i64>,
    pub n: u64,
    pub average: f64,
    pub bad_primes: Vec<u64>,
    pub bad_prime_sum: f64,
    pub bad_prime_limit: u64,
    /// Predicted main term.
    pub main_term: f64,
    /// `exp(sum_{bad p} 1/p) - 1`, the size of the bad-prime correction.
    pub correction_scale: f64,
    /// Whether `N >= R^{4kJ+1}`.
    pub scale_condition_met: bool,
    /// `max |r_j| / N`, the share of reads outside `[1, N]`.
    pub edge_fraction: f64,
}

/// `E_{x in [N]} prod_j nu(x + r_j)` with bad-prime diagnostics.
pub fn empirical_correlation(
    ev: &NuEvaluator,
    shifts: &[i64],
    n: u64,
    exec: Exec,
) -> Result<CorrelationReport> {
    let average = ev.shifted_product_mean(n, shifts, exec)?;
    let ctx = ev.context();
    let sys = LinearFormSystem::from_context(ctx, shifts.to_vec())?;
    let limit = bad_prime_limit(ctx.r);
    let bad = bad_primes_linear(&sys, limit)?;
    let bad_prime_sum = bad.reciprocal_sum();
    let kj = (ctx.k * shifts.len()) as f64;
    // Relative slack so that eta0 = 1/(4kJ+1) with N = ctx.n counts as met.
    let scale_condition_met = (4.0 * kj + 1.0) * ctx.r.ln() <= (n as f64).ln() * (1.0 + 1e-12);
    let max_shift = shifts.iter().map(|s| s.unsigned_abs()).max().unwrap_or(0);
    Ok(CorrelationReport {
        shifts: shifts.to_vec(),
        n,
        average,
        bad_primes: bad.primes,
        bad_prime_sum,
        bad_prime_limit: limit,
        main_term: 1.0,
        correction_scale: bad_prime_sum.exp_m1(),
        scale_condition_met,
        edge_fraction: max_shift as f64 / n as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub ell: Vec<i64>,
    pub shifts: Vec<i64>,
    pub average: f64,
    /// `sum_{i,i', j<j'} S(i, j, i', j', ell)`; `None` when two shifted forms coincide.
    pub bad_sum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyFormsReport {
    pub h: u64,
    pub n: u64,
    pub average: f64,
    /// Average of the per-cell bad-prime sums over cells where it is finite.
    pub mean_bad_sum: f64,
    pub degenerate_cells: usize,
    pub bad_prime_limit: u64,
    pub cells: Vec<CellReport>,
}

fn grid(h: u64, d: usize) -> Vec<Vec<i64>> {
    let mut cells = vec![Vec::new()];
    for _ in 0..d {
        cells = cells
            .into_iter()
            .flat_map(|c: Vec<i64>| {
                (1..=h as i64).map(move |l| {
                    let mut c = c.clone();
                    c.push(l);
                    c
                })
            })
            .collect();
    }
    cells
}

/// `E_{ell in [H]^d} E_{x in [N]} prod_j nu(x + Q_j(ell))`.
pub fn polynomial_forms_average(
    ev: &NuEvaluator,
    qs: &[IntPolynomial],
    h: u64,
    n: u64,
    exec: Exec,
) -> Result<PolyFormsReport> {
    if qs.is_empty() || h == 0 {
        return Err(Error::Domain(
            "need at least one polynomial and H >= 1".into(),
        ));
    }
    let d = qs
        .iter()
        .map(IntPolynomial::nvars)
        .max()
        .unwrap_or(0)
        .max(1);
    for a in 0..qs.len() {
        for b in a + 1..qs.len() {
            if (&qs[a] - &qs[b]).is_constant() {
                return Err(Error::Precondition(format!(
                    "Q_{} - Q_{} is constant",
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    let cells = (h as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if cells.saturating_mul(n as u128) > POLY_FORMS_BUDGET {
        return Err(Error::Capacity(format!(
            "H^d * N = {h}^{d} * {n} exceeds the budget {POLY_FORMS_BUDGET}"
        )));
    }
    let ctx = ev.context();
    let limit = bad_prime_limit(ctx.r);
    let w = LinearFormSystem::from_context(ctx, vec![0])?.small_prime_bound();
    let mut reports = Vec::new();
    for ell in grid(h, d) {
        let shifts = qs
            .iter()
            .map(|q| {
                let mut pt = ell.clone();
                pt.truncate(q.nvars());
                q.eval_to_i64(&pt)
            })
            .collect::<Result<Vec<i64>>>()?;
        let average = ev.shifted_product_mean(n, &shifts, exec)?;
        let bad_sum = cell_bad_sum(ctx.w_mod, ctx.params.tuple.as_slice(), &shifts, w, limit);
        reports.push(CellReport {
            ell,
            shifts,
            average,
            bad_sum,
        });
    }
    let avgs: Vec<f64> = reports.iter().map(|c| c.average).collect();
    let finite: Vec<f64> = reports.iter().filter_map(|c| c.bad_sum).collect();
    let mean_bad_sum = if finite.is_empty() {
        0.0
    } else {
        pairwise_sum(&finite) / finite.len() as f64
    };
    Ok(PolyFormsReport {
        h,
        n,
        average: pairwise_sum(&avgs) / avgs.len() as f64,
        mean_bad_sum,
        degenerate_cells: reports.len() - finite.len(),
        bad_prime_limit: limit,
        cells: reports,
    })
}

fn cell_bad_sum(w_mod: u64, offsets: &[u64], shifts: &[i64], w: u64, limit: u64) -> Option<f64> {
    let mut total = 0.0;
    for j in 0..shifts.len() {
        for jp in j + 1..shifts.len() {
            for &hi in offsets {
                for &hip in offsets {
                    let diff = (w_mod as i128 * shifts[j] as i128 + hi as i128)
                        - (w_mod as i128 * shifts[jp] as i128 + hip as i128);
                    let diff = u64::try_from(diff.unsigned_abs()).ok()?;
                    if diff == 0 {
                        return None;
                    }
                    total += crate::arith::primality::factorize_u64(diff)
                        .into_iter()
                        .filter(|&(p, _)| p > w && p <= limit)
                        .map(|(p, _)| 1.0 / p as f64)
                        .sum::<f64>();
                }
            }
        }
    }
    Some(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TidySumReport {
    pub value: f64,
    /// Primes up to the limit dividing every coefficient of `Delta Q`.
    pub vanishing_primes: Vec<u64>,
    pub vanishing_sum: f64,
}

/// `E_{ell in [H]^d} sum (log p)^c / p` over primes `w < p <= limit` outside
/// the vanishing set that divide `Delta Q(ell)`.
pub fn tidy_sum(
    delta_q: &IntPolynomial,
    h: u64,
    w: u64,
    limit: u64,
    c: f64,
) -> Result<TidySumReport> {
    if delta_q.is_zero() {
        return Err(Error::Domain("Delta Q vanishes identically".into()));
    }
    if h == 0 {
        return Err(Error::Domain("H must be positive".into()));
    }
    let d = delta_q.nvars().max(1);
    let table = PrimeTable::new(limit.max(2))?;
    let primes: Vec<u64> = table
        .primes_up_to(limit)
        .iter()
        .map(|&p| p as u64)
        .filter(|&p| p > w)
        .collect();
    let content = delta_q.content();
    let vanishing_primes: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| (&content % BigInt::from(p)).is_zero())
        .collect();
    let active: Vec<u64> = primes
        .into_iter()
        .filter(|p| vanishing_primes.binary_search(p).is_err())
        .collect();
    let weight = |p: u64| (p as f64).ln().powf(c) / p as f64;
    let mut per_cell = Vec::new();
    for ell in grid(h, d) {
        let mut pt = ell;
        pt.truncate(delta_q.nvars());
        let v = delta_q.eval_i64(&pt)?.abs();
        let terms: Vec<f64> = active
            .iter()
            .filter(|&&p| v.is_zero() || v.is_multiple_of(&BigInt::from(p)))
            .map(|&p| weight(p))
            .collect();
        per_cell.push(terms.iter().sum::<f64>());
    }
    Ok(TidySumReport {
        value: pairwise_sum(&per_cell) / per_cell.len() as f64,
        vanishing_sum: vanishing_primes.iter().map(|&p| 1.0 / p as f64).sum(),
        vanishing_primes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(w: u64, b: u64, r: &[i64], h: &[u64]) -> LinearFormSystem {
        LinearFormSystem::new(w, b, r.to_vec(), h.to_vec()).unwrap()
    }

    #[test]
    fn four_term_expansion() {
        let s = sys(2, 1, &[0], &[0]);
        let z = ZMatrix::from_xi(&[0.7], &[-1.3], 5.0).unwrap();
        for p in [3u64, 5, 7, 101] {
            let pf = p as f64;
            let (a, b) = (p_pow_neg(p, z.z[0]), p_pow_neg(p, z.z_prime[0]));
            let want = Complex64::new(1.0, 0.0) - a / pf - b / pf + a * b / pf;
            assert!((euler_factor_ep(&s, p, &z).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn small_primes_have_unit_factor() {
        let s = sys(30, 11, &[0, 1], &[0, 2, 6]);
        let z = ZMatrix::from_xi(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6], &[0.0; 6], 4.0).unwrap();
        for p in [2u64, 3, 5] {
            assert_eq!(
                euler_factor_ep(&s, p, &z).unwrap(),
                Complex64::new(1.0, 0.0)
            );
        }
    }

    #[test]
    fn large_real_part_gives_one() {
        let s = sys(2, 1, &[0, 3], &[0]);
        let z = ZMatrix::real(2, 1e-3).unwrap();
        assert!((euler_factor_ep(&s, 7, &z).unwrap() - 1.0).norm() < 1e-12);
        assert!((euler_factor_ep_prime(7, &z) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn too_many_forms_rejected() {
        let s = sys(2, 1, &[0, 1, 2], &[0, 2, 6]);
        let z = ZMatrix::real(9, 3.0).unwrap();
        assert!(matches!(
            euler_factor_ep(&s, 7, &z),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn unit_modulus_targets_one() {
        let s = sys(1, 0, &[0], &[1]);
        let z = ZMatrix::real(1, 1e6f64.ln()).unwrap();
        let r = euler_product_experiment(&s, &z, &[100, 1000]).unwrap();
        assert_eq!(r.target, 1.0);
        assert!((r.checkpoints[1].ratio_to_target - 1.0).abs() < 0.05);
    }

    #[test]
    fn tidy_sum_examples() {
        let one = IntPolynomial::univariate(&[1]);
        assert_eq!(tidy_sum(&one, 10, 1, 100, 1.0).unwrap().value, 0.0);
        assert!(tidy_sum(&IntPolynomial::univariate(&[0]), 10, 1, 100, 1.0).is_err());
        let two_l = IntPolynomial::univariate(&[0, 2]);
        let r = tidy_sum(&two_l, 10, 1, 100, 0.0).unwrap();
        assert_eq!(r.vanishing_primes, vec![2]);
        assert_eq!(r.vanishing_sum, 0.5);
    }

    #[test]
    fn bad_prime_limit_grows() {
        assert_eq!(bad_prime_limit(1.0), 1);
        assert!(bad_prime_limit(10.0) > 100);
        assert_eq!(bad_prime_limit(1e9), BAD_PRIME_LIMIT_CAP);
    }
}

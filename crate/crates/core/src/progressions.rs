//! The configuration-counting average, W-rescaling of polynomials, and
//! searches for polynomial progressions in `A` and among the primes.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::admissible::Tuple;
use crate::arith::{is_prime_u64, IntPolynomial};
use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Exec};
use crate::wtrick::{
    build_a_with, build_f_a, choose_parameters, select_residue, ParamOverrides, SieveContext,
};

/// A configuration `x0 + P_j(y0)`, optionally shifted by a gap `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProgressionHit {
    pub x0: u64,
    pub y0: u64,
    pub values: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<u64>,
}

fn eval_at(polys: &[IntPolynomial], y: i64) -> Result<Vec<i64>> {
    polys.iter().map(|p| p.eval_to_i64(&[y])).collect()
}

fn check_univariate(polys: &[IntPolynomial]) -> Result<()> {
    if polys.is_empty() {
        return Err(Error::Domain("no polynomials".into()));
    }
    if let Some(p) = polys.iter().find(|p| p.nvars() > 1) {
        return Err(Error::Unsupported(format!(
            "polynomial in {} variables; expected one",
            p.nvars()
        )));
    }
    Ok(())
}

/// `E_{y in [M]} E_{x in [N]} prod_j f(x + P_j(y))` with `f` given on `[1, N]`
/// (`f[0]` is `f(1)`) and zero elsewhere.
pub fn lambda_count(f: &[f64], polys: &[IntPolynomial], m: u64, exec: Exec) -> Result<f64> {
    check_univariate(polys)?;
    if m < 1 || f.is_empty() {
        return Err(Error::Domain("M and N must be positive".into()));
    }
    let n = f.len() as i64;
    let ys: Vec<i64> = (1..=m as i64).collect();
    let rows = exec.map_items(&ys, |&y| -> Result<f64> {
        let s = eval_at(polys, y)?;
        let lo = s.iter().map(|&v| 1 - v).max().unwrap().max(1);
        let hi = s.iter().map(|&v| n - v).min().unwrap().min(n);
        if lo > hi {
            return Ok(0.0);
        }
        let terms: Vec<f64> = (lo..=hi)
            .map(|x| s.iter().fold(1.0, |acc, &v| acc * f[(x + v - 1) as usize]))
            .collect();
        Ok(pairwise_sum(&terms))
    });
    let rows = rows.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&rows) / (n as f64 * m as f64))
}

/// `Q_j(y) = P_j(W y) / W`: a monomial `a y^i` becomes `a W^{i-1} y^i`.
pub fn rescale_polys(polys: &[IntPolynomial], w_mod: u64) -> Result<Vec<IntPolynomial>> {
    if w_mod == 0 {
        return Err(Error::Domain("W must be positive".into()));
    }
    let w = BigInt::from(w_mod);
    polys
        .iter()
        .enumerate()
        .map(|(j, p)| {
            if !p.constant_term().is_zero() {
                return Err(Error::Precondition(format!(
                    "P_{}(0) = {} is not zero",
                    j + 1,
                    p.constant_term()
                )));
            }
            let terms = p.terms().iter().map(|(e, c)| {
                let deg: u32 = e.iter().sum();
                (e.clone(), c * num_traits::pow(w.clone(), deg as usize - 1))
            });
            Ok(IntPolynomial::from_terms(p.nvars(), terms))
        })
        .collect()
}

/// Hits of [`search_in_a`] for one `y`, ascending in `x`; with `first` set,
/// stops at the first one.
fn hits_in_a_row(
    a: &[u64],
    polys: &[IntPolynomial],
    x_max: u64,
    y: i64,
    first: bool,
) -> Result<Vec<ProgressionHit>> {
    let s = eval_at(polys, y)?;
    let mut hits = Vec::new();
    // Candidates come from the first polynomial: x = v - P_1(y) for v in A.
    for &v in a {
        let x = v as i128 - s[0] as i128;
        if x < 1 {
            continue;
        }
        if x > x_max as i128 {
            break;
        }
        let values: Option<Vec<u64>> = s
            .iter()
            .map(|&d| u64::try_from(x + d as i128).ok())
            .collect();
        if let Some(values) = values {
            if values.iter().all(|u| a.binary_search(u).is_ok()) {
                hits.push(ProgressionHit {
                    x0: x as u64,
                    y0: y as u64,
                    values,
                    gap: None,
                });
                if first {
                    break;
                }
            }
        }
    }
    Ok(hits)
}

/// All `(x, y)` with `1 <= x <= x_max`, `1 <= y <= y_max` and every
/// `x + P_j(y)` in the sorted set `a`, ordered by `(y, x)`.
pub fn search_in_a(
    a: &[u64],
    polys: &[IntPolynomial],
    x_max: u64,
    y_max: u64,
    exec: Exec,
) -> Result<Vec<ProgressionHit>> {
    check_univariate(polys)?;
    let ys: Vec<i64> = (1..=y_max as i64).collect();
    let rows = exec.map_items(&ys, |&y| hits_in_a_row(a, polys, x_max, y, false));
    Ok(rows.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

/// All `(x, y, b)` with `b <= b_max` such that every `x + P_j(y)` and every
/// `x + P_j(y) + b` is prime, ordered by `(b, y, x)`.
pub fn search_bounded_gap(
    polys: &[IntPolynomial],
    b_max: u64,
    x_max: u64,
    y_max: u64,
    exec: Exec,
) -> Result<Vec<ProgressionHit>> {
    check_univariate(polys)?;
    if b_max < 1 {
        return Err(Error::Domain("b_max must be at least 1".into()));
    }
    let ys: Vec<i64> = (1..=y_max as i64).collect();
    let rows = exec.map_items(&ys, |&y| -> Result<Vec<(u64, u64, u64, Vec<u64>)>> {
        let s = eval_at(polys, y)?;
        let mut hits = Vec::new();
        for x in 1..=x_max as i64 {
            let values: Option<Vec<u64>> = s
                .iter()
                .map(|&d| u64::try_from(x as i128 + d as i128).ok())
                .collect();
            let Some(values) = values else { continue };
            if !values.iter().all(|&v| is_prime_u64(v)) {
                continue;
            }
            for b in 1..=b_max {
                if values
                    .iter()
                    .all(|&v| v.checked_add(b).is_some_and(is_prime_u64))
                {
                    hits.push((b, y as u64, x as u64, values.clone()));
                }
            }
        }
        Ok(hits)
    });
    let mut all = rows.into_iter().collect::<Result<Vec<_>>>()?.concat();
    all.sort_by(|l, r| (l.0, l.1, l.2).cmp(&(r.0, r.1, r.2)));
    Ok(all
        .into_iter()
        .map(|(b, y, x, values)| ProgressionHit {
            x0: x,
            y0: y,
            values,
            gap: Some(b),
        })
        .collect())
}

/// The first hit of [`search_in_a`] in its `(y, x)` order, stopping early.
pub fn first_in_a(
    a: &[u64],
    polys: &[IntPolynomial],
    x_max: u64,
    y_max: u64,
) -> Result<Option<ProgressionHit>> {
    check_univariate(polys)?;
    for y in 1..=y_max as i64 {
        if let Some(h) = hits_in_a_row(a, polys, x_max, y, true)?.pop() {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

/// The first hit of [`search_bounded_gap`] in its `(b, y, x)` order, stopping
/// early.
pub fn first_bounded_gap(
    polys: &[IntPolynomial],
    b_max: u64,
    x_max: u64,
    y_max: u64,
) -> Result<Option<ProgressionHit>> {
    check_univariate(polys)?;
    if b_max < 1 {
        return Err(Error::Domain("b_max must be at least 1".into()));
    }
    let mut prime_configs = Vec::new();
    for y in 1..=y_max as i64 {
        let s = eval_at(polys, y)?;
        for x in 1..=x_max as i64 {
            let values: Option<Vec<u64>> = s
                .iter()
                .map(|&d| u64::try_from(x as i128 + d as i128).ok())
                .collect();
            if let Some(values) = values.filter(|v| v.iter().all(|&u| is_prime_u64(u))) {
                prime_configs.push((x as u64, y as u64, values));
            }
        }
    }
    for b in 1..=b_max {
        for (x, y, values) in &prime_configs {
            if values
                .iter()
                .all(|&v| v.checked_add(b).is_some_and(is_prime_u64))
            {
                return Ok(Some(ProgressionHit {
                    x0: *x,
                    y0: *y,
                    values: values.clone(),
                    gap: Some(b),
                }));
            }
        }
    }
    Ok(None)
}

/// Inputs of the end-to-end run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub n_prime: u64,
    pub tuple: Tuple,
    pub m: usize,
    pub epsilon0: f64,
    pub j_max: usize,
    pub overrides: ParamOverrides,
    /// Range `[1, M]` of the polynomial variable.
    pub m_range: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub context: SieveContext,
    pub set_size: usize,
    pub support_size: usize,
    pub rescaled: Vec<String>,
    pub lambda: f64,
    /// `hits * value^t / (N M)`, which must reproduce `lambda`.
    pub lambda_from_hits: f64,
    /// Hits in original coordinates `x0 = Wx + b`, `y0 = Wy`.
    pub hits: Vec<ProgressionHit>,
    pub consistent: bool,
}

/// Builds `A`, the W-trick context and `f_A`, rescales the polynomials and
/// compares the counting average against an exhaustive search on the same
/// ranges.
pub fn progression_pipeline(
    cfg: &PipelineConfig,
    polys: &[IntPolynomial],
    exec: Exec,
) -> Result<PipelineReport> {
    check_univariate(polys)?;
    // Rejects P_j(0) != 0 before any sieving.
    rescale_polys(polys, 1)?;
    let base = choose_parameters(
        cfg.n_prime,
        cfg.tuple.clone(),
        cfg.m,
        cfg.epsilon0,
        cfg.j_max,
        &cfg.overrides,
    )?;
    let a = build_a_with(&base.params, exec)?;
    let sel = select_residue(&a, &base)?;
    let ctx = base.with_residue(sel.b)?;
    let f = build_f_a(&a, &ctx);
    let q = rescale_polys(polys, ctx.w_mod)?;
    let lambda = lambda_count(&f.dense(), &q, cfg.m_range, exec)?;
    let coset_hits = search_in_a(&f.positions, &q, ctx.n, cfg.m_range, exec)?;

    let mut hits = Vec::with_capacity(coset_hits.len());
    for h in &coset_hits {
        let x0 = ctx.w_mod * h.x0 + ctx.b;
        let y0 = ctx.w_mod * h.y0;
        let values = polys
            .iter()
            .map(|p| {
                let v = BigInt::from(x0) + p.eval_i64(&[y0 as i64])?;
                v.to_u64()
                    .ok_or_else(|| Error::Numeric(format!("value {v} out of range")))
            })
            .collect::<Result<Vec<u64>>>()?;
        if let Some(v) = values.iter().find(|v| a.binary_search(v).is_err()) {
            return Err(Error::Numeric(format!("mapped value {v} is not in A")));
        }
        hits.push(ProgressionHit {
            x0,
            y0,
            values,
            gap: None,
        });
    }
    let lambda_from_hits =
        hits.len() as f64 * f.value.powi(polys.len() as i32) / (ctx.n as f64 * cfg.m_range as f64);
    let consistent = (lambda > 0.0) == !hits.is_empty()
        && (lambda - lambda_from_hits).abs() <= 1e-12 * lambda.abs().max(f64::MIN_POSITIVE);
    Ok(PipelineReport {
        set_size: a.len(),
        support_size: f.positions.len(),
        rescaled: q.iter().map(|p| p.to_string()).collect(),
        lambda,
        lambda_from_hits,
        hits,
        consistent,
        context: ctx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_polys;

    fn polys(s: &str) -> Vec<IntPolynomial> {
        parse_polys(s, &["y"]).unwrap()
    }

    #[test]
    fn rescale_examples() {
        let q = rescale_polys(&polys("y^2"), 6).unwrap();
        assert_eq!(q, polys("6*y^2"));
        assert_eq!(rescale_polys(&polys("y"), 210).unwrap(), polys("y"));
        assert!(matches!(
            rescale_polys(&polys("y^2+1"), 6),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lambda_trivial_cases() {
        let ones = vec![1.0; 50];
        let v = lambda_count(&ones, &polys("0"), 3, Exec::Sequential).unwrap();
        assert_eq!(v, 1.0);
        let zeros = vec![0.0; 50];
        assert_eq!(
            lambda_count(&zeros, &polys("0, y"), 3, Exec::Sequential).unwrap(),
            0.0
        );
        assert!(lambda_count(&ones, &[], 3, Exec::Sequential).is_err());
    }

    #[test]
    fn search_examples() {
        let primes: Vec<u64> = (2..=200).filter(|&n| is_prime_u64(n)).collect();
        let hits = search_in_a(&primes, &polys("y^2, 2*y^2"), 100, 10, Exec::Sequential).unwrap();
        assert!(hits
            .iter()
            .any(|h| h.x0 == 3 && h.y0 == 2 && h.values == vec![7, 11]));
        let evens: Vec<u64> = (1..=100).map(|n| 2 * n).collect();
        assert!(
            search_in_a(&evens, &polys("0, 1"), 200, 5, Exec::Sequential)
                .unwrap()
                .is_empty()
        );
        let single = search_in_a(&primes, &polys("0"), 1000, 1, Exec::Sequential).unwrap();
        assert_eq!(single.len(), primes.len());
    }

    #[test]
    fn gap_examples() {
        let hits = search_bounded_gap(&polys("y"), 2, 10, 3, Exec::Sequential).unwrap();
        let twin = hits.iter().find(|h| h.gap == Some(2)).unwrap();
        assert_eq!((twin.x0, twin.y0, &twin.values), (2, 1, &vec![3]));
        let hits = search_bounded_gap(&polys("y"), 1, 10, 3, Exec::Sequential).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!((hits[0].x0, hits[0].y0, &hits[0].values), (1, 1, &vec![2]));
    }
}

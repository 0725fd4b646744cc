//! The majorant
//! `nu(x) = (phi(W) log R / W)^k prod_i (sum_{d | Wx+b+h_i} mu(d) chi(log d / log R))^2`.
//!
//! Only squarefree `d < R` contribute (`chi` vanishes at `log d / log R >= 1`),
//! so every contributing `d` is a product of distinct primes `p < R` dividing
//! `n_i = Wx+b+h_i`. Both evaluation paths reduce `n_i` to that prime list
//! (ascending) and then run the same divisor-sum routine, which makes their
//! results bit-identical.

use serde::Serialize;
use smallvec::SmallVec;

use super::cutoff::CutoffFunction;
use crate::arith::modp::inv_mod;
use crate::arith::sieve::PrimeTable;
use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Exec, CHUNK};
use crate::wtrick::{IndicatorTable, SieveContext};

/// Longest range one bulk call will materialize.
pub const MAX_BULK_LEN: usize = 1 << 25;

type PrimeList = SmallVec<[u32; 6]>;

#[derive(Debug, Clone)]
pub struct NuEvaluator {
    ctx: SieveContext,
    chi: CutoffFunction,
    /// Primes `p < R`, ascending.
    primes: Vec<u64>,
    log_r: f64,
    scale: f64,
}

impl NuEvaluator {
    pub fn new(ctx: SieveContext, chi: CutoffFunction) -> Result<Self> {
        if !(ctx.r >= 2.0) {
            return Err(Error::Config(format!("R = {} below 2", ctx.r)));
        }
        if ctx.r > u32::MAX as f64 {
            return Err(Error::Capacity(format!("R = {} exceeds 2^32", ctx.r)));
        }
        let table = PrimeTable::new(ctx.r.floor() as u64)?;
        let primes = table
            .primes()
            .iter()
            .map(|&p| p as u64)
            .filter(|&p| (p as f64) < ctx.r)
            .collect();
        let log_r = ctx.r.ln();
        let scale = (ctx.phi_w as f64 * log_r / ctx.w_mod as f64).powi(ctx.k as i32);
        Ok(NuEvaluator {
            ctx,
            chi,
            primes,
            log_r,
            scale,
        })
    }

    pub fn context(&self) -> &SieveContext {
        &self.ctx
    }

    pub fn cutoff(&self) -> &CutoffFunction {
        &self.chi
    }

    /// Primes below `R`.
    pub fn sieving_primes(&self) -> &[u64] {
        &self.primes
    }

    /// `(phi(W) log R / W)^k`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `nu` at a point whose shifts have no prime factor below `R`:
    /// the scale times `chi(0)^{2k}`, accumulated exactly as the evaluator does.
    pub fn support_value(&self) -> f64 {
        let c = self.chi.at_zero();
        let mut prod = 1.0;
        for _ in 0..self.ctx.k {
            prod *= c * c;
        }
        self.scale * prod
    }

    /// `sum_{d} mu(d) chi(log d / log R)` over squarefree `d < R` built from
    /// `primes` (ascending), depth first with pruning at `R`.
    pub fn divisor_sum(&self, primes: &[u32]) -> f64 {
        let mut acc = self.chi.at_zero();
        self.extend_sum(primes, 0, 1, -1.0, &mut acc);
        acc
    }

    fn extend_sum(&self, primes: &[u32], start: usize, d: u64, sign: f64, acc: &mut f64) {
        for j in start..primes.len() {
            let nd = d * primes[j] as u64;
            if nd as f64 >= self.ctx.r {
                break;
            }
            *acc += sign * self.chi.eval((nd as f64).ln() / self.log_r);
            self.extend_sum(primes, j + 1, nd, -sign, acc);
        }
    }

    fn shift_value(&self, x: i64, h: u64) -> Result<i128> {
        let n = self.ctx.w_mod as i128 * x as i128 + self.ctx.b as i128 + h as i128;
        if n == 0 {
            return Err(Error::Domain(format!("Wx + b + h vanishes at x = {x}")));
        }
        Ok(n)
    }

    fn combine(&self, lists: impl Iterator<Item = f64>) -> f64 {
        let mut prod = 1.0;
        for s in lists {
            prod *= s * s;
        }
        self.scale * prod
    }

    /// `nu(x)` for any integer `x` with every `Wx+b+h_i` nonzero; negative
    /// shifts are read through `|Wx+b+h_i|`.
    pub fn value_at(&self, x: i64) -> Result<f64> {
        let mut sums = Vec::with_capacity(self.ctx.k);
        for &h in self.ctx.params.tuple.as_slice() {
            let n = self.shift_value(x, h)?.unsigned_abs();
            let ps: PrimeList = self
                .primes
                .iter()
                .filter(|&&p| n % p as u128 == 0)
                .map(|&p| p as u32)
                .collect();
            sums.push(self.divisor_sum(&ps));
        }
        Ok(self.combine(sums.into_iter()))
    }

    /// `nu(x)` by trial division, for `1 <= x <= N`.
    pub fn pointwise(&self, x: u64) -> Result<f64> {
        if x < 1 || x > self.ctx.n {
            return Err(Error::Domain(format!(
                "x = {x} outside [1, {}]",
                self.ctx.n
            )));
        }
        self.value_at(x as i64)
    }

    /// `nu` on `[x1, x2] ⊆ [1, N]` by marking progressions of each prime.
    pub fn bulk(&self, x1: u64, x2: u64) -> Result<Vec<f64>> {
        self.bulk_with(x1, x2, Exec::default())
    }

    pub fn bulk_with(&self, x1: u64, x2: u64, exec: Exec) -> Result<Vec<f64>> {
        if x1 < 1 || x2 > self.ctx.n || x1 > x2 {
            return Err(Error::Domain(format!(
                "range [{x1}, {x2}] not inside [1, {}]",
                self.ctx.n
            )));
        }
        self.values_in(x1 as i64, x2 as i64, exec)
    }

    /// Bulk evaluation on any integer range avoiding zeros of the shifts.
    pub fn values_in(&self, x1: i64, x2: i64, exec: Exec) -> Result<Vec<f64>> {
        if x1 > x2 {
            return Ok(Vec::new());
        }
        let len = (x2 - x1 + 1) as u64;
        if len > MAX_BULK_LEN as u64 {
            return Err(Error::Capacity(format!(
                "range of {len} points exceeds {MAX_BULK_LEN}; evaluate it in segments of at most {MAX_BULK_LEN}"
            )));
        }
        self.check_no_zero(x1, x2)?;
        let chunks = exec.map_chunks(len as usize, CHUNK, |r| {
            self.chunk_values(x1 + r.start as i64, r.len())
        });
        Ok(chunks.concat())
    }

    fn check_no_zero(&self, x1: i64, x2: i64) -> Result<()> {
        let w = self.ctx.w_mod as i128;
        for &h in self.ctx.params.tuple.as_slice() {
            let c = self.ctx.b as i128 + h as i128;
            if c % w == 0 {
                let x = -c / w;
                if x >= x1 as i128 && x <= x2 as i128 {
                    return Err(Error::Domain(format!("Wx + b + h vanishes at x = {x}")));
                }
            }
        }
        Ok(())
    }

    /// Per-shift prime lists for `x` in `[start, start + len)`: for every
    /// prime `p < R`, the solutions of `Wx + b + h_i = 0 (mod p)` form one
    /// residue class (or none when `p | W` and `p` does not divide `b + h_i`).
    fn mark(&self, h: u64, start: i64, len: usize) -> Vec<PrimeList> {
        let mut lists = vec![PrimeList::new(); len];
        let c = self.ctx.b as u128 + h as u128;
        for &p in &self.primes {
            let wm = self.ctx.w_mod % p;
            let cm = (c % p as u128) as u64;
            if wm == 0 {
                if cm == 0 {
                    lists.iter_mut().for_each(|l| l.push(p as u32));
                }
                continue;
            }
            let r = ((p - cm) % p) as u128 * inv_mod(wm, p) as u128 % p as u128;
            let off = (r as i64 - start).rem_euclid(p as i64) as usize;
            for l in lists.iter_mut().skip(off).step_by(p as usize) {
                l.push(p as u32);
            }
        }
        lists
    }

    fn chunk_values(&self, start: i64, len: usize) -> Vec<f64> {
        let marks: Vec<Vec<PrimeList>> = self
            .ctx
            .params
            .tuple
            .as_slice()
            .iter()
            .map(|&h| self.mark(h, start, len))
            .collect();
        (0..len)
            .map(|idx| self.combine(marks.iter().map(|m| self.divisor_sum(&m[idx]))))
            .collect()
    }

    /// `E_{x in [n]} nu(x)` via bulk evaluation.
    pub fn mean(&self, n: u64) -> Result<f64> {
        self.mean_with(n, Exec::default())
    }

    pub fn mean_with(&self, n: u64, exec: Exec) -> Result<f64> {
        self.shifted_product_mean(n, &[0], exec)
    }

    /// `E_{x in [n]} prod_j nu(x + r_j)`. Reads outside `[1, N]` evaluate
    /// `nu` directly from its definition.
    pub fn shifted_product_mean(&self, n: u64, shifts: &[i64], exec: Exec) -> Result<f64> {
        if n < 1 {
            return Err(Error::Domain("empty range".into()));
        }
        if shifts.is_empty() {
            return Err(Error::Domain("no shifts".into()));
        }
        if n > i64::MAX as u64 / 2 {
            return Err(Error::Capacity(format!("range length {n} too large")));
        }
        let lo_shift = *shifts.iter().min().unwrap();
        let hi_shift = *shifts.iter().max().unwrap();
        let partials = exec.map_chunks(n as usize, CHUNK, |r| -> Result<f64> {
            let x1 = 1 + r.start as i64;
            let x2 = r.end as i64;
            let base = x1 + lo_shift;
            let vals = self.values_in(base, x2 + hi_shift, Exec::Sequential)?;
            let prods: Vec<f64> = (x1..=x2)
                .map(|x| {
                    shifts
                        .iter()
                        .fold(1.0, |acc, &s| acc * vals[(x + s - base) as usize])
                })
                .collect();
            Ok(pairwise_sum(&prods))
        });
        let partials = partials.into_iter().collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&partials) / n as f64)
    }

    /// Mean, extremes and a histogram of `nu` over `[1, n]`.
    pub fn stats_with(&self, n: u64, buckets: usize, exec: Exec) -> Result<NuStats> {
        if n < 1 {
            return Err(Error::Domain("empty range".into()));
        }
        let values = self.values_in(1, n as i64, exec)?;
        let partials: Vec<f64> = values.chunks(CHUNK).map(pairwise_sum).collect();
        let mean = pairwise_sum(&partials) / n as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut histogram = Vec::new();
        if buckets > 0 {
            let width = if max > min {
                (max - min) / buckets as f64
            } else {
                1.0
            };
            let mut counts = vec![0u64; buckets];
            for &v in &values {
                let i = (((v - min) / width) as usize).min(buckets - 1);
                counts[i] += 1;
            }
            histogram = counts
                .into_iter()
                .enumerate()
                .map(|(i, count)| Bucket {
                    lo: min + i as f64 * width,
                    hi: min + (i + 1) as f64 * width,
                    count,
                })
                .collect();
        }
        Ok(NuStats {
            n,
            r: self.ctx.r,
            w_mod: self.ctx.w_mod,
            b: self.ctx.b,
            mean,
            min,
            max,
            histogram,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucket {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuStats {
    pub n: u64,
    pub r: f64,
    pub w_mod: u64,
    pub b: u64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Vec<Bucket>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub x: u64,
    pub f: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<Violation>,
}

impl MajorizationReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `f_A(x) <= nu(x)` on the support of `f_A` (elsewhere `f_A = 0`).
pub fn verify_majorization(f: &IndicatorTable, ev: &NuEvaluator) -> Result<MajorizationReport> {
    verify_majorization_with(f, ev, Exec::default())
}

pub fn verify_majorization_with(
    f: &IndicatorTable,
    ev: &NuEvaluator,
    exec: Exec,
) -> Result<MajorizationReport> {
    if f.n != ev.context().n {
        return Err(Error::Precondition(format!(
            "indicator built for N = {}, evaluator for N = {}",
            f.n,
            ev.context().n
        )));
    }
    let nus = exec.map_items(&f.positions, |&x| ev.value_at(x as i64));
    let mut violations = Vec::new();
    for (&x, nu) in f.positions.iter().zip(nus) {
        let nu = nu?;
        if f.value > nu {
            violations.push(Violation { x, f: f.value, nu });
        }
    }
    Ok(MajorizationReport {
        checked: f.positions.len(),
        violations: violations.len(),
        first_violation: violations.into_iter().next(),
    })
}

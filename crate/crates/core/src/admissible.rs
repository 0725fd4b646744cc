//! Admissible tuples: verification with witnesses, the residue sets
//! `Omega_H(p)` and `X_W`, and a search for narrow admissible tuples.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::modp::inv_mod;
use crate::arith::primality::{factorize_u64, is_prime_u64};
use crate::error::{Error, Result};

/// Sorted list of distinct non-negative shifts `h_1 < ... < h_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Tuple(Vec<u64>);

impl TryFrom<Vec<u64>> for Tuple {
    type Error = Error;
    fn try_from(h: Vec<u64>) -> Result<Self> {
        Tuple::new(h)
    }
}

impl From<Tuple> for Vec<u64> {
    fn from(t: Tuple) -> Self {
        t.0
    }
}

impl Tuple {
    /// Accepts only strictly increasing input.
    pub fn new(h: Vec<u64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Domain("empty tuple".into()));
        }
        if let Some(w) = h.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Domain(if w[0] == w[1] {
                format!("duplicate element {}", w[0])
            } else {
                format!("unsorted elements {} then {}", w[0], w[1])
            }));
        }
        Ok(Tuple(h))
    }

    /// Sorts first; duplicates are still rejected.
    pub fn from_unsorted(mut h: Vec<u64>) -> Result<Self> {
        h.sort_unstable();
        Self::new(h)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn diameter(&self) -> u64 {
        self.0[self.0.len() - 1] - self.0[0]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn max(&self) -> u64 {
        *self.0.last().unwrap()
    }

    /// Parses the tuple file format: whitespace-separated non-negative
    /// integers, strictly increasing.
    pub fn parse(s: &str) -> Result<Self> {
        let h = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("not a non-negative integer: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(h).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_line(&self) -> String {
        self.0
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_line() + "\n")?;
        Ok(())
    }
}

/// For each prime `p <= k`, a residue `a_p` avoided by every `h_i mod p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityWitness {
    pub residues: BTreeMap<u64, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Admissibility {
    Admissible(AdmissibilityWitness),
    /// The shifts cover every residue class modulo `prime`.
    Inadmissible {
        prime: u64,
    },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible(_))
    }
}

pub(crate) fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime_u64(p)).collect()
}

fn hit_classes(t: &Tuple, p: u64) -> Vec<bool> {
    let mut hit = vec![false; p as usize];
    for &h in t.as_slice() {
        hit[(h % p) as usize] = true;
    }
    hit
}

/// Checks admissibility, returning the smallest avoided residue for every
/// prime `p <= k`, or the smallest prime whose classes are all covered.
///
/// Only primes `p <= k` are examined: `k` shifts occupy at most `k` residue
/// classes, so for `p > k` some class is always free.
pub fn is_admissible(t: &Tuple) -> Admissibility {
    let mut residues = BTreeMap::new();
    for p in primes_up_to(t.k() as u64) {
        match hit_classes(t, p).iter().position(|&h| !h) {
            Some(a) => {
                residues.insert(p, a as u64);
            }
            None => return Admissibility::Inadmissible { prime: p },
        }
    }
    Admissibility::Admissible(AdmissibilityWitness { residues })
}

/// `Omega_H(p)`: residues `b mod p` with `b != -h_i (mod p)` for all `i`.
pub fn omega_h(t: &Tuple, p: u64) -> Vec<u64> {
    let mut excluded = vec![false; p as usize];
    for &h in t.as_slice() {
        excluded[((p - h % p) % p) as usize] = true;
    }
    (0..p).filter(|&b| !excluded[b as usize]).collect()
}

/// Largest `X_W` that [`enumerate_x_w`] will materialize.
pub const MAX_XW_LEN: u64 = 10_000_000;

/// `X_W`: residues `b mod W` with `b != -h_i (mod p)` for every `p | W`,
/// assembled from the `Omega_H(p)` by the Chinese remainder theorem.
pub fn enumerate_x_w(t: &Tuple, w_mod: u64) -> Result<Vec<u64>> {
    if w_mod == 0 {
        return Err(Error::Domain("W must be positive".into()));
    }
    let factors = factorize_u64(w_mod);
    if factors.iter().any(|&(_, e)| e > 1) {
        return Err(Error::Domain(format!("W = {w_mod} is not squarefree")));
    }
    let expected: u64 = factors
        .iter()
        .map(|&(p, _)| omega_h(t, p).len() as u64)
        .product();
    if expected > MAX_XW_LEN {
        return Err(Error::Capacity(format!(
            "|X_W| = {expected} exceeds {MAX_XW_LEN}"
        )));
    }
    let mut residues = vec![0u64];
    let mut modulus = 1u64;
    for &(p, _) in &factors {
        let omega = omega_h(t, p);
        let inv = if modulus % p == 0 {
            0
        } else {
            inv_mod(modulus % p, p)
        };
        let mut next = Vec::with_capacity(residues.len() * omega.len());
        for &r in &residues {
            for &s in &omega {
                // x = r + modulus * ((s - r) * modulus^{-1} mod p)
                let k = ((s + p - r % p) % p) as u128 * inv as u128 % p as u128;
                next.push(r + modulus * k as u64);
            }
        }
        residues = next;
        modulus *= p;
    }
    residues.sort_unstable();
    Ok(residues)
}

/// `|X_W|` via the product formula, without enumeration.
pub fn x_w_cardinality(t: &Tuple, w_mod: u64) -> Result<u64> {
    let factors = factorize_u64(w_mod);
    if w_mod == 0 || factors.iter().any(|&(_, e)| e > 1) {
        return Err(Error::Domain(format!("W = {w_mod} is not squarefree")));
    }
    Ok(factors
        .iter()
        .map(|&(p, _)| omega_h(t, p).len() as u64)
        .product())
}

/// Local-search state: a window `[0, diameter]` with one removed residue
/// class per small prime.
struct ResidueSieve {
    primes: Vec<u64>,
    removed: Vec<u64>,
    hits: Vec<u32>,
    survivors: usize,
}

impl ResidueSieve {
    fn new(primes: Vec<u64>, removed: Vec<u64>, diameter: u64) -> Self {
        let mut s = ResidueSieve {
            primes,
            removed,
            hits: vec![0; diameter as usize + 1],
            survivors: diameter as usize + 1,
        };
        for i in 0..s.primes.len() {
            s.toggle(i, s.removed[i], true);
        }
        s
    }

    fn toggle(&mut self, i: usize, class: u64, add: bool) {
        let p = self.primes[i] as usize;
        let mut n = class as usize;
        while n < self.hits.len() {
            if add {
                if self.hits[n] == 0 {
                    self.survivors -= 1;
                }
                self.hits[n] += 1;
            } else {
                self.hits[n] -= 1;
                if self.hits[n] == 0 {
                    self.survivors += 1;
                }
            }
            n += p;
        }
    }

    fn set(&mut self, i: usize, class: u64) {
        let old = self.removed[i];
        self.toggle(i, old, false);
        self.toggle(i, class, true);
        self.removed[i] = class;
    }

    /// Narrowest run of `k` consecutive survivors (earliest on ties), shifted
    /// to start at 0.
    fn extract(&self, k: usize) -> Option<Tuple> {
        let surv: Vec<u64> = (0..self.hits.len() as u64)
            .filter(|&n| self.hits[n as usize] == 0)
            .collect();
        if surv.len() < k {
            return None;
        }
        let start = (0..=surv.len() - k).min_by_key(|&i| (surv[i + k - 1] - surv[i], i))?;
        let base = surv[start];
        Tuple::new(surv[start..start + k].iter().map(|&v| v - base).collect()).ok()
    }
}

/// Searches for an admissible `k`-tuple of diameter at most `max_diameter`.
///
/// The seed is the first `k` primes above `k`, shifted to start at 0 (it is
/// admissible because none of its elements is divisible by a prime `<= k`).
/// If it is too wide, a local search runs over the choice of one removed
/// residue class per prime `p <= k` in the window `[0, max_diameter]`: every
/// `k` survivors of such a sieve form an admissible tuple. Single-class moves
/// are accepted when the survivor count does not drop; the search restarts
/// from a fresh assignment after a run of non-improving moves. Moves come from
/// a fixed-seed generator, so the result depends only on the arguments.
/// `budget` caps the number of moves; `None` means it ran out.
pub fn search_narrow_tuple(k: usize, max_diameter: u64, budget: u64) -> Option<Tuple> {
    if k == 0 {
        return None;
    }
    if k == 1 {
        return Some(Tuple(vec![0]));
    }
    if max_diameter + 1 < k as u64 {
        return None;
    }
    let mut seed = Vec::with_capacity(k);
    let mut q = k as u64 + 1;
    while seed.len() < k {
        if is_prime_u64(q) {
            seed.push(q);
        }
        q += 1;
    }
    let first = seed[0];
    let seed = Tuple(seed.iter().map(|&v| v - first).collect());
    if seed.diameter() <= max_diameter {
        return Some(seed);
    }

    let primes = primes_up_to(k as u64);
    let np = primes.len();
    // The seed avoids the class of -first modulo each small prime.
    let warm: Vec<u64> = primes.iter().map(|&p| (p - first % p) % p).collect();
    let mut sieve = ResidueSieve::new(primes.clone(), warm, max_diameter);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let stall_limit = 30 * np as u64 + 100;
    let mut stall = 0u64;
    for _ in 0..budget {
        if sieve.survivors >= k {
            return sieve.extract(k);
        }
        if stall >= stall_limit {
            let fresh: Vec<u64> = primes.iter().map(|&p| rng.gen_range(0..p)).collect();
            sieve = ResidueSieve::new(primes.clone(), fresh, max_diameter);
            stall = 0;
            continue;
        }
        let i = rng.gen_range(0..np);
        let old = sieve.removed[i];
        let class = rng.gen_range(0..primes[i]);
        if class == old {
            stall += 1;
            continue;
        }
        let before = sieve.survivors;
        sieve.set(i, class);
        if sieve.survivors < before {
            sieve.set(i, old);
            stall += 1;
        } else if sieve.survivors == before {
            stall += 1;
        } else {
            stall = 0;
        }
    }
    (sieve.survivors >= k).then(|| sieve.extract(k)).flatten()
}

const BUNDLED_50: &str = include_str!("../data/admissible_50_246.txt");

/// The bundled admissible 50-tuple of diameter 246, re-verified on load.
pub fn bundled_50_tuple() -> Result<Tuple> {
    let t = Tuple::parse(BUNDLED_50)?;
    if t.k() != 50 || t.diameter() > 246 {
        return Err(Error::Config(format!(
            "bundled tuple has k = {}, diameter = {}",
            t.k(),
            t.diameter()
        )));
    }
    match is_admissible(&t) {
        Admissibility::Admissible(_) => Ok(t),
        Admissibility::Inadmissible { prime } => Err(Error::Config(format!(
            "bundled tuple covers every class mod {prime}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(h: &[u64]) -> Tuple {
        Tuple::new(h.to_vec()).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        match is_admissible(&t(&[0])) {
            Admissibility::Admissible(w) => assert!(w.residues.is_empty()),
            _ => panic!(),
        }
        match is_admissible(&t(&[0, 2, 6])) {
            Admissibility::Admissible(w) => {
                assert_eq!(w.residues, BTreeMap::from([(2, 1), (3, 1)]))
            }
            _ => panic!(),
        }
        assert_eq!(
            is_admissible(&t(&[0, 2, 4])),
            Admissibility::Inadmissible { prime: 3 }
        );
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_h(&t(&[0, 2, 6]), 2), vec![1]);
        assert_eq!(omega_h(&t(&[0, 2, 6]), 5), vec![1, 2]);
        assert_eq!(omega_h(&t(&[0]), 7), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn x_w_examples() {
        assert_eq!(enumerate_x_w(&t(&[0, 2, 6]), 30).unwrap(), vec![11, 17]);
        assert_eq!(enumerate_x_w(&t(&[0]), 2).unwrap(), vec![1]);
        assert_eq!(enumerate_x_w(&t(&[0]), 1).unwrap(), vec![0]);
        assert!(matches!(enumerate_x_w(&t(&[0]), 12), Err(Error::Domain(_))));
        assert_eq!(x_w_cardinality(&t(&[0, 2, 6]), 210).unwrap(), 2 * 4);
    }

    #[test]
    fn tuple_parsing() {
        assert_eq!(Tuple::parse(" 0 2\t6\n").unwrap(), t(&[0, 2, 6]));
        assert!(Tuple::parse("0 2 2").is_err());
        assert!(Tuple::parse("0 6 2").is_err());
        assert!(Tuple::parse("0 -2").is_err());
        assert!(Tuple::parse("").is_err());
        assert_eq!(Tuple::from_unsorted(vec![6, 0, 2]).unwrap(), t(&[0, 2, 6]));
    }

    #[test]
    fn small_searches() {
        assert_eq!(search_narrow_tuple(2, 2, 1000), Some(t(&[0, 2])));
        let s = search_narrow_tuple(3, 6, 10_000).unwrap();
        assert!(s == t(&[0, 2, 6]) || s == t(&[0, 4, 6]));
        assert_eq!(search_narrow_tuple(3, 4, 10_000), None);
        assert_eq!(search_narrow_tuple(4, 2, 10), None);
    }

    #[test]
    fn bundled_tuple_loads() {
        let b = bundled_50_tuple().unwrap();
        assert_eq!(b.k(), 50);
        assert_eq!(b.diameter(), 246);
    }
}

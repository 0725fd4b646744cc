mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use primeprog::local_factors::{
    alpha_density, bad_prime_sum, bad_primes_linear, classify_prime, classify_system, local_factor,
    verify_local_estimates, DivisibilityConstraint, LinearFormSystem, PrimeClass,
};

fn q(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Density by direct enumeration of `y` over `Z_M`.
fn alpha_brute(cons: &[DivisibilityConstraint]) -> BigRational {
    let m = cons
        .iter()
        .fold(1u64, |l, c| l / common::gcd(l, c.modulus) * c.modulus);
    let hits = (0..m as i64)
        .filter(|&y| {
            cons.iter()
                .all(|c| (c.a * y + c.c).rem_euclid(c.modulus as i64) == 0)
        })
        .count() as u64;
    q(hits, m)
}

fn constraint() -> impl Strategy<Value = DivisibilityConstraint> {
    (1u64..40, -30i64..30, -30i64..30).prop_map(|(modulus, a, c)| DivisibilityConstraint {
        modulus,
        a,
        c,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn alpha_matches_enumeration(cons in prop::collection::vec(constraint(), 1..4)) {
        let m = cons.iter().fold(1u64, |l, c| l / common::gcd(l, c.modulus) * c.modulus);
        prop_assume!(m <= 10_000);
        prop_assert_eq!(alpha_density(&cons).unwrap(), alpha_brute(&cons));
    }

    /// With squarefree moduli, the density is the product over `p` of the
    /// local factor of the forms whose modulus `p` divides.
    #[test]
    fn alpha_is_a_product_of_local_factors(
        w in prop::sample::select(vec![1u64, 2, 6]),
        b in 1u64..7,
        r in prop::collection::vec(-20i64..20, 1..3),
        mods in prop::collection::vec(prop::sample::select(vec![1u64, 5, 7, 11, 35, 55, 77]), 1..4),
    ) {
        let forms: Vec<(i64, i64)> = r.iter().map(|&rj| (w as i64, w as i64 * rj + b as i64)).collect();
        let cons: Vec<DivisibilityConstraint> = mods
            .iter()
            .zip(forms.iter().cycle())
            .map(|(&modulus, &(a, c))| DivisibilityConstraint { modulus, a, c })
            .collect();
        let mut product = BigRational::one();
        for p in [5u64, 7, 11] {
            let active: Vec<_> = cons
                .iter()
                .filter(|c| c.modulus % p == 0)
                .map(|c| primeprog::arith::IntPolynomial::univariate(&[c.c, c.a]))
                .collect();
            product *= local_factor(&active, p).unwrap();
        }
        prop_assert_eq!(alpha_density(&cons).unwrap(), product);
    }
}

fn lin(c: &[i64]) -> primeprog::arith::IntPolynomial {
    primeprog::arith::IntPolynomial::univariate(c)
}

#[test]
fn local_factor_values_are_densities() {
    for p in common::primes_upto(60) {
        for a in -3..=3 {
            for c in -3..=3 {
                let cp = local_factor(&[lin(&[c, a])], p).unwrap();
                assert!(cp >= BigRational::zero() && cp <= BigRational::one());
                if a.rem_euclid(p as i64) != 0 {
                    assert_eq!(cp, q(1, p), "p = {p}, {a}x + {c}");
                }
            }
        }
    }
}

#[test]
fn terrible_implies_bad() {
    for p in common::primes_upto(30) {
        for a in 0..=2 * p as i64 {
            for c in 0..=2 * p as i64 {
                let class = classify_prime(&[lin(&[c, a]), lin(&[1, 1])], p).unwrap();
                if class.is_terrible() {
                    assert!(class.is_bad());
                }
                let vanish = a % p as i64 == 0 && c % p as i64 == 0;
                assert_eq!(class.is_terrible(), vanish);
            }
        }
    }
}

#[test]
fn bad_prime_sum_matches_termwise_sum() {
    let sys = LinearFormSystem::new(6, 1, vec![0, 7, 35], vec![0, 4]).unwrap();
    let bad = bad_primes_linear(&sys, 10_000).unwrap();
    let cs = sys.constants();
    let mut want: Vec<u64> = Vec::new();
    for p in common::primes_upto(10_000).into_iter().filter(|&p| p > 3) {
        let hit =
            (0..cs.len()).any(|a| (a + 1..cs.len()).any(|b| (cs[a] - cs[b]) % p as i128 == 0));
        if hit {
            want.push(p);
        }
    }
    assert_eq!(bad.primes, want);
    let termwise: f64 = want.iter().map(|&p| 1.0 / p as f64).sum();
    assert!((bad_prime_sum(&sys, 10_000).unwrap() - termwise).abs() < 1e-15);
}

#[test]
fn degenerate_small_primes_are_flagged() {
    let sys = LinearFormSystem::new(30, 11, vec![0], vec![0, 2, 6]).unwrap();
    for p in [2u64, 3, 5] {
        assert_eq!(
            classify_system(&sys, p).unwrap(),
            PrimeClass::DegenerateSmallPrime
        );
    }
    assert!(classify_system(&sys, 7).unwrap().is_good());
}

#[test]
fn local_estimates_over_a_range() {
    let sys = LinearFormSystem::new(2, 1, vec![0, 1, 10], vec![0, 2, 6]).unwrap();
    let primes = common::primes_upto(400);
    let r = verify_local_estimates(&sys, &primes, 0).unwrap();
    assert!(r.bounded());
    assert_eq!(r.max_p2_singleton_dev, 0.0);
    assert_eq!(r.per_prime.len(), primes.len());
    // Bad primes of this system have a pair of forms sharing a root.
    assert!(r.per_prime.iter().any(|e| e.class.is_bad()));
    assert!(r.max_p_cp <= 1.0 + 1e-12);
}

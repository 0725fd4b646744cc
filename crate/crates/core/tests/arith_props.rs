mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use primeprog::arith::modp::mod_p_gcd;
use primeprog::arith::{
    euler_phi, factorize, mobius, primorial, IntPolynomial, ModPPolynomial, PrimeTable,
};

#[test]
fn sieve_matches_trial_division() {
    let t = PrimeTable::new(100_000).unwrap();
    let naive = common::primes_upto(100_000);
    let got: Vec<u64> = t.primes().iter().map(|&p| p as u64).collect();
    assert_eq!(got, naive);
    for n in 2..=100_000u64 {
        let spf = (2..=n).find(|d| n % d == 0).filter(|_| true);
        if n < 2_000 || n % 997 == 0 {
            assert_eq!(t.lpf(n).map_or(n, |p| p), spf.unwrap(), "n = {n}");
        }
    }
}

#[test]
fn multiplicative_functions_match_definitions() {
    let t = PrimeTable::new(3_000).unwrap();
    for n in 1..=3_000u64 {
        assert_eq!(
            mobius(n as i64).unwrap() as i64,
            common::mobius(n),
            "mu({n})"
        );
        assert_eq!(euler_phi(n as i64).unwrap(), common::phi(n), "phi({n})");
        assert_eq!(t.mobius(n).unwrap() as i64, common::mobius(n));
        let prod: u64 = factorize(n as i64)
            .unwrap()
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product();
        assert_eq!(prod, n);
    }
    assert!(mobius(0).is_err());
    assert_eq!(primorial(7).unwrap(), 210);
    assert_eq!(primorial(1).unwrap(), 1);
}

fn small_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, 1..6)
}

proptest! {
    #[test]
    fn smallest_prime_factor_by_trial_division(n in 2u64..1_000_000_000_000) {
        let t = PrimeTable::new(1_000).unwrap();
        let spf = t.smallest_prime_factor(n).unwrap();
        let naive = (2..).take_while(|d| d * d <= n).find(|d| n % d == 0).unwrap_or(n);
        prop_assert_eq!(spf, naive);
    }

    #[test]
    fn factorization_multiplies_back(n in 1i64..4_000_000_000_000_000_000) {
        let f = factorize(n).unwrap();
        let mut prod = 1u128;
        for w in f.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
        for &(p, e) in &f {
            prop_assert!(primeprog::arith::is_prime_u64(p));
            prod *= (p as u128).pow(e);
        }
        prop_assert_eq!(prod, n as u128);
    }

    #[test]
    fn reduction_commutes_with_evaluation(c in small_poly(), x in -1000i64..1000, pi in 0usize..6) {
        let p = [2u64, 3, 5, 7, 101, 65_537][pi];
        let poly = IntPolynomial::univariate(&c);
        let m = poly.reduce_mod(p);
        let exact = poly.eval_i64(&[x]).unwrap();
        let want = exact.mod_floor_u64(p);
        prop_assert_eq!(m.eval(&[x.rem_euclid(p as i64) as u64]), want);
        let lifted = m.lift();
        prop_assert_eq!(lifted.reduce_mod(p), m);
        for (e, coef) in poly.terms() {
            let diff = coef - lifted.coefficient(e);
            prop_assert_eq!(diff.mod_floor_u64(p), 0);
        }
    }

    #[test]
    fn gcd_roots_are_common_roots(a in small_poly(), b in small_poly(), pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        let ra = IntPolynomial::univariate(&a).reduce_mod(p);
        let rb = IntPolynomial::univariate(&b).reduce_mod(p);
        prop_assume!(!ra.is_zero() || !rb.is_zero());
        let g = mod_p_gcd(&ra, &rb).unwrap();
        let lead = g.to_dense().unwrap().last().copied();
        prop_assert_eq!(lead, Some(1));
        for x in 0..p {
            let common = ra.eval(&[x]) == 0 && rb.eval(&[x]) == 0;
            prop_assert_eq!(g.eval(&[x]) == 0, common);
        }
        // gcd(a, a) is a made monic.
        if !ra.is_zero() {
            prop_assert_eq!(mod_p_gcd(&ra, &ra).unwrap().degree(), ra.degree());
        }
    }

    #[test]
    fn display_parse_roundtrip(c in small_poly()) {
        let poly = IntPolynomial::univariate(&c);
        let back = primeprog::arith::parse_poly(&poly.to_string(), &["y"]).unwrap();
        prop_assert_eq!(back, poly);
    }
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        self.mod_floor(&BigInt::from(p)).to_u64().unwrap()
    }
}

#[test]
fn modp_from_dense_roundtrip() {
    let m = ModPPolynomial::from_dense(7, &[3, 0, 9]);
    assert_eq!(m.to_dense().unwrap(), vec![3, 0, 2]);
}

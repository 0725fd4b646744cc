mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use primeprog::admissible::Tuple;
use primeprog::arith::{parse_polys, IntPolynomial};
use primeprog::progressions::{
    first_bounded_gap, first_in_a, lambda_count, progression_pipeline, rescale_polys,
    search_bounded_gap, search_in_a, PipelineConfig,
};
use primeprog::wtrick::ParamOverrides;
use primeprog::{Error, Exec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rescaling_is_exact(
        coeffs in prop::collection::vec(-20i64..20, 1..5),
        w in prop::sample::select(vec![1u64, 2, 6, 30, 210]),
        y in -50i64..50,
    ) {
        let mut c = vec![0i64];
        c.extend(coeffs);
        let p = IntPolynomial::univariate(&c);
        let q = &rescale_polys(std::slice::from_ref(&p), w).unwrap()[0];
        let lhs = q.eval_i64(&[y]).unwrap() * BigInt::from(w);
        let rhs = p.eval(&[BigInt::from(w) * y]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lambda_of_an_indicator_counts_configurations(
        mask in prop::collection::vec(any::<bool>(), 20..60),
        polys in prop::sample::select(vec!["0, y", "y, 2*y", "0, y^2, 3*y", "-y, y"]),
        m in 1u64..6,
    ) {
        let polys = parse_polys(polys, &["y"]).unwrap();
        let f: Vec<f64> = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let set: Vec<u64> = (1..=f.len() as u64).filter(|&x| mask[x as usize - 1]).collect();
        let n = f.len() as u64;
        let lambda = lambda_count(&f, &polys, m, Exec::Sequential).unwrap();
        let hits = search_in_a(&set, &polys, n, m, Exec::Sequential).unwrap();
        let mut count = 0u64;
        for y in 1..=m as i64 {
            for x in 1..=n as i64 {
                let ok = polys.iter().all(|p| {
                    let v = x + p.eval_to_i64(&[y]).unwrap();
                    v >= 1 && v <= n as i64 && mask[v as usize - 1]
                });
                count += ok as u64;
            }
        }
        prop_assert_eq!(hits.len() as u64, count);
        prop_assert!((lambda * (n * m) as f64 - count as f64).abs() < 1e-9);
    }
}

#[test]
fn lambda_with_primes_matches_double_loop() {
    let n = 100usize;
    let f: Vec<f64> = (1..=n as u64)
        .map(|x| common::is_prime(x) as u8 as f64)
        .collect();
    let polys = parse_polys("0, y^2", &["y"]).unwrap();
    let lambda = lambda_count(&f, &polys, 3, Exec::default()).unwrap();
    let mut total = 0.0;
    for y in 1..=3u64 {
        for x in 1..=n as u64 {
            let v = x + y * y;
            if v <= n as u64 && common::is_prime(x) && common::is_prime(v) {
                total += 1.0;
            }
        }
    }
    assert_eq!(lambda, total / 300.0);
}

#[test]
fn every_hit_reverifies() {
    let primes = common::primes_upto(5_000);
    let polys = parse_polys("0, 2*y, 6*y", &["y"]).unwrap();
    let hits = search_in_a(&primes, &polys, 4_000, 30, Exec::default()).unwrap();
    assert!(!hits.is_empty());
    let mut last = (0, 0);
    for h in &hits {
        assert!((h.y0, h.x0) > last);
        last = (h.y0, h.x0);
        assert_eq!(h.values, vec![h.x0, h.x0 + 2 * h.y0, h.x0 + 6 * h.y0]);
        assert!(h.values.iter().all(|&v| common::is_prime(v)));
    }
    let gaps = search_bounded_gap(
        &parse_polys("y, 2*y", &["y"]).unwrap(),
        12,
        50,
        5,
        Exec::default(),
    )
    .unwrap();
    let mut last = (0, 0, 0);
    for h in &gaps {
        let b = h.gap.unwrap();
        assert!((b, h.y0, h.x0) > last);
        last = (b, h.y0, h.x0);
        assert!(h
            .values
            .iter()
            .all(|&v| common::is_prime(v) && common::is_prime(v + b)));
    }
}

#[test]
fn consecutive_primes_only_at_two() {
    let hits = search_bounded_gap(
        &parse_polys("y^2", &["y"]).unwrap(),
        1,
        100,
        10,
        Exec::default(),
    )
    .unwrap();
    assert_eq!(hits.len(), 1);
    assert_eq!((hits[0].x0, hits[0].y0, &hits[0].values), (1, 1, &vec![2]));
    assert!(search_bounded_gap(
        &parse_polys("y", &["y"]).unwrap(),
        0,
        10,
        1,
        Exec::default()
    )
    .is_err());
}

fn desk_config() -> PipelineConfig {
    PipelineConfig {
        n_prime: 100_000,
        tuple: Tuple::new(vec![0, 2]).unwrap(),
        m: 1,
        epsilon0: 0.3,
        j_max: 1,
        overrides: ParamOverrides {
            eta0: Some(1.0 / 9.0),
            ..Default::default()
        },
        m_range: 10,
    }
}

#[test]
fn pipeline_with_the_constant_polynomial() {
    let polys = parse_polys("0", &["y"]).unwrap();
    let r = progression_pipeline(&desk_config(), &polys, Exec::default()).unwrap();
    assert!(r.consistent);
    let f_mean = r.support_size as f64 * r.context.indicator_value() / r.context.n as f64;
    assert!((r.lambda - f_mean).abs() <= 1e-12 * r.lambda);
    // One hit per support point and value of y.
    assert_eq!(r.hits.len(), r.support_size * 10);
}

#[test]
fn pipeline_rejects_nonzero_constant_terms_first() {
    let polys = parse_polys("y, 2*y + 1", &["y"]).unwrap();
    let mut cfg = desk_config();
    // An N' this large would take a long time to sieve if it were reached.
    cfg.n_prime = 900_000_000;
    assert!(matches!(
        progression_pipeline(&cfg, &polys, Exec::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn early_exit_returns_the_first_ordered_hit() {
    let primes: Vec<u64> = common::primes_upto(2_000);
    for src in ["y^2, 2*y^2", "y, 2*y", "2*y", "y, 2*y, 3*y"] {
        let polys = parse_polys(src, &["y"]).unwrap();
        let all = search_in_a(&primes, &polys, 200, 12, Exec::Sequential).unwrap();
        assert_eq!(
            first_in_a(&primes, &polys, 200, 12).unwrap(),
            all.first().cloned(),
            "{src}"
        );
        let gaps = search_bounded_gap(&polys, 30, 60, 5, Exec::Sequential).unwrap();
        assert_eq!(
            first_bounded_gap(&polys, 30, 60, 5).unwrap(),
            gaps.first().cloned(),
            "{src}"
        );
    }
    let evens: Vec<u64> = (1..500).map(|n| 2 * n).collect();
    let odd = parse_polys("0, 1*y", &["y"]).unwrap();
    assert_eq!(first_in_a(&evens, &odd, 50, 1).unwrap(), None);
    assert!(first_in_a(&evens, &odd, 50, 2)
        .unwrap()
        .is_some_and(|h| h.y0 == 2));
}

//! Randomized property tests for the public API.

use aliquot::ff_curve::RationalCurveModel;
use aliquot::galois_models::kronecker;
use aliquot::gl2_stats::{crt_combine, table_gl2_prime, TraceDetTable};
use aliquot::point_count;
use aliquot::primes;
use aliquot::constants::{self, Flavor};
use proptest::prelude::*;

fn next_prime(mut n: u64) -> u64 {
    loop {
        if primes::is_prime(n) {
            return n;
        }
        n += 1;
    }
}

proptest! {
    #[test]
    fn curve_strings_round_trip(
        a1 in -9i64..=9, a2 in -9i64..=9, a3 in -9i64..=9,
        a4 in -9i64..=9, a6 in -9i64..=9,
    ) {
        if let Ok(curve) = RationalCurveModel::new(a1, a2, a3, a4, a6) {
            let s = format!("[{a1},{a2},{a3},{a4},{a6}]");
            prop_assert_eq!(RationalCurveModel::parse(&s).unwrap(), curve);
        }
    }

    #[test]
    fn hasse_bound_on_random_primes(
        a4 in -20i64..=20, a6 in -20i64..=20, seed in 10_000u64..2_000_000,
    ) {
        let p = next_prime(seed);
        if let Ok(curve) = RationalCurveModel::short(a4, a6) {
            let reduced = curve.reduce(p);
            if reduced.good_reduction {
                let a = point_count::a_p(&reduced).unwrap();
                prop_assert!((a * a) as u64 <= 4 * p, "a_p = {} at p = {}", a, p);
            }
        }
    }

    #[test]
    fn order_methods_agree(
        a4 in -10i64..=10, a6 in -10i64..=10, seed in 600u64..4_000,
    ) {
        let p = next_prime(seed);
        if let Ok(curve) = RationalCurveModel::short(a4, a6) {
            let reduced = curve.reduce(p);
            if reduced.good_reduction && p > 3 {
                prop_assert_eq!(
                    point_count::order_bsgs(&reduced).unwrap(),
                    point_count::order_charsum(&reduced).unwrap()
                );
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative(a in -50i64..=50, b in -50i64..=50, n in 1i64..=60) {
        prop_assert_eq!(kronecker(a, n) * kronecker(b, n), kronecker(a * b, n));
    }

    #[test]
    fn table_json_round_trips(l in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let t = table_gl2_prime(l);
        prop_assert_eq!(TraceDetTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn crt_is_symmetric(
        pair in prop::sample::select(vec![(2u64, 3u64), (2, 5), (3, 5), (2, 7), (3, 7)]),
    ) {
        let (a, b) = pair;
        let (ta, tb) = (table_gl2_prime(a), table_gl2_prime(b));
        prop_assert_eq!(
            crt_combine(&ta, &tb).unwrap(),
            crt_combine(&tb, &ta).unwrap()
        );
    }

    #[test]
    fn li_integral_is_monotone(x in 10f64..1e9, factor in 1.5f64..10.0) {
        for flavor in [Flavor::Cycle, Flavor::Sequence] {
            let lo = constants::li_integral(x, 2, flavor).unwrap();
            let hi = constants::li_integral(x * factor, 2, flavor).unwrap();
            prop_assert!(hi > lo && lo > 0.0, "{lo} vs {hi} at x = {x}");
        }
    }

    #[test]
    fn closed_factors_positive_and_near_one(seed in 10u64..2_000) {
        let ell = next_prime(seed.max(5));
        for l in [2u32, 3] {
            let f = constants::euler_factor_closed(ell, l).unwrap();
            let v = {
                use num_traits::ToPrimitive;
                f.to_f64().unwrap()
            };
            prop_assert!(v > 0.0);
            // |f - 1| = O(1/ell^2) with a generous constant.
            prop_assert!((v - 1.0).abs() < 40.0 / (ell * ell) as f64, "ell={ell} v={v}");
        }
    }
}

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use apsq::expbound::{exponent_set_d2, exponent_set_d6};
use apsq::numutil::{is_prime, perfect_power};
use apsq::oracle::oracle_enumerate;
use apsq::qring::{qconj, qmul, qnorm, QuadInt};
use apsq::sieve::classify_for_r;
use apsq::solver_d2::solve_n4;
use apsq::solver_d6::solve_all_d6;
use apsq::{Solution, Verdict};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn perfect_power_round_trip(b in 2u64..2000, e in 1u32..9) {
        let y = num_traits::pow(BigInt::from(b), e as usize);
        let (base, k) = perfect_power(&y).unwrap();
        prop_assert_eq!(num_traits::pow(base.clone(), k as usize), y);
        prop_assert_eq!(k % e, 0);
        // the base itself is not a perfect power
        prop_assert_eq!(perfect_power(&base).unwrap().1, 1);
    }

    #[test]
    fn norm_is_multiplicative(d in prop::sample::select(vec![-105i64, -1, 2, 7]),
                              a in -300i64..300, b in -300i64..300, c in -300i64..300, e in -300i64..300) {
        let x = QuadInt::new(a, b, d).unwrap();
        let y = QuadInt::new(c, e, d).unwrap();
        prop_assert_eq!(qnorm(&qmul(&x, &y).unwrap()), qnorm(&x) * qnorm(&y));
        prop_assert_eq!(qnorm(&x), qnorm(&qconj(&x)));
    }

    #[test]
    fn reflection_preserves_solutions(d in 2u32..=10, r in 1u64..500, x in -5000i64..5000, n in 2u32..6) {
        let s = Solution::new(d, r, x, 1, n);
        let lhs = apsq::solution::sum_of_squares(d, r, &s.x);
        let reflected = s.reflect();
        prop_assert_eq!(apsq::solution::sum_of_squares(d, r, &reflected.x), lhs);
        prop_assert_eq!(reflected.reflect().x, s.x);
    }
}

#[test]
fn d6_matches_oracle() {
    // y <= 2000 keeps yn small; solutions beyond are allowed to exist
    for r in (1..=200u64).filter(|r| r.gcd(&6) == 1) {
        let set = exponent_set_d6(r).unwrap();
        let ns: BTreeSet<u32> = set.primes.iter().map(|&p| p as u32).collect();
        let want: BTreeSet<Solution> = oracle_enumerate(6, r, &ns, 2000).into_iter().collect();
        let got: BTreeSet<Solution> =
            solve_all_d6(r).unwrap().solutions().into_iter().filter(|s| s.y.magnitude() <= &2000u32.into()).collect();
        assert_eq!(got, want, "r={r}");
    }
}

#[test]
fn oracle_exponents_lie_in_the_candidate_set() {
    let primes: BTreeSet<u32> = (3..=31).filter(|&p| is_prime(p as u64)).collect();
    for r in (1..=300u64).step_by(2) {
        let set = exponent_set_d2(r).unwrap();
        for s in oracle_enumerate(2, r, &primes, 3000) {
            if s.y.magnitude() > &1u32.into() {
                assert!(set.contains(s.n as u64), "{s:?}");
            }
        }
    }
    for r in (1..=300u64).filter(|r| r.gcd(&6) == 1) {
        let set = exponent_set_d6(r).unwrap();
        for s in oracle_enumerate(6, r, &primes, 3000) {
            assert!(set.contains(s.n as u64), "{s:?}");
        }
    }
}

#[test]
fn quartic_witnesses_reconstruct() {
    for r in (1..=400u64).step_by(2) {
        for c in solve_n4(r, 200) {
            let s = &c.solution;
            assert!(s.holds() && s.is_primitive(), "{s:?}");
            let w = c.witness.as_ref().expect("n = 4 rows carry a witness");
            let (x, y) = w.reconstruct(r, 4).expect("witness reconstructs");
            assert_eq!((&x, &y), (&s.x, &s.y.abs()), "r={r}");
        }
    }
}

#[test]
fn eliminations_hold_for_each_r() {
    let ns: BTreeSet<u32> = (2..=11).collect();
    for d in [4u32, 5, 7, 8, 9, 10] {
        for r in 1..=60u64 {
            for s in oracle_enumerate(d, r, &ns, 600) {
                assert_eq!(classify_for_r(d, r, s.n).unwrap(), Verdict::Open, "{s:?}");
            }
        }
    }
}

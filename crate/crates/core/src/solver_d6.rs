//! Six squares with an odd prime exponent:
//! `X^2 + 105 r^2 = 6 y^n` with `X = 6x + 21r`, solved through
//! `X + r sqrt(-105) = gamma^n / 6^((n-1)/2)`, `gamma = u + v sqrt(-105)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expbound::{exponent_set_d6, ExponentSet};
use crate::numutil::{divisors, IntPoly};
use crate::qring::{qnorm, qpow, ModQuad, QuadInt};
use crate::rootsearch::find_integer_roots;
use crate::sieve::{Reason, Verdict};
use crate::solution::{dedup_certified, perfect_power_lifts, Certified, DescentWitness, Solution, UnitCase};
use crate::solver_d2::require_odd_prime;

pub const RING: i64 = -105;

/// `B_n(u) = sum over odd k of C(n,k) u^(n-k) (-105)^((k-1)/2) v^k`, the
/// `sqrt(-105)` coordinate of `(u + v sqrt(-105))^n`.
pub fn imag_part_poly(n: u64, v: i64) -> Result<IntPoly> {
    require_odd_prime(n)?;
    if v == 0 {
        return Err(Error::InvalidArgument("v must be nonzero".into()));
    }
    let vb = BigInt::from(v);
    let d = BigInt::from(RING);
    let mut coeffs = vec![BigInt::zero(); n as usize];
    let mut binom = BigInt::one();
    let mut d_pow = BigInt::one();
    let mut v_pow = BigInt::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * (n - k + 1) / k;
            v_pow *= &vb;
        }
        if k % 2 == 1 {
            coeffs[(n - k) as usize] = &binom * &d_pow * &v_pow;
            d_pow *= &d;
        }
    }
    Ok(IntPoly::new(coeffs))
}

fn six_pow(n: u64) -> BigInt {
    num_traits::pow(BigInt::from(6), ((n - 1) / 2) as usize)
}

/// All primitive solutions with one odd prime exponent.
pub fn solve_odd_prime_d6(r: u64, n: u64) -> Result<Vec<Certified>> {
    require_odd_prime(n)?;
    if r == 0 {
        return Err(Error::NonPositive(r.to_string()));
    }
    if r.gcd(&6) != 1 {
        return Err(Error::NotCoprimeToSix(r));
    }
    let rb = BigInt::from(r);
    let scale = six_pow(n);
    let target = &rb * &scale;
    let six = BigInt::from(6);
    let mut found = Vec::new();
    for v in divisors(r as i64, true)? {
        let residue_ok = |z: u64, ell: u64| {
            let dm = RING.rem_euclid(ell as i64) as u64;
            let gamma = ModQuad { a: z, b: v.rem_euclid(ell as i64) as u64 };
            let p = gamma.pow(n, dm, ell);
            let want = crate::numutil::pow_mod(6, (n - 1) / 2, ell) * (r % ell) % ell;
            p.b == want
        };
        let build = || {
            let mut coeffs = imag_part_poly(n, v).expect("validated").coeffs().to_vec();
            coeffs[0] -= &target;
            IntPoly::new(coeffs)
        };
        for u in find_integer_roots(residue_ok, build, n as usize - 1) {
            let vb = BigInt::from(v);
            let gamma = QuadInt::new(u.clone(), vb.clone(), RING).expect("squarefree");
            let (a, b) = qpow(&gamma, n).into_parts();
            if b != target {
                continue;
            }
            let (big_x, rem) = a.div_rem(&scale);
            if !rem.is_zero() {
                continue;
            }
            let (x, rem) = (&big_x - &rb * 21u32).div_rem(&six);
            if !rem.is_zero() {
                continue;
            }
            let (y, rem) = qnorm(&gamma).div_rem(&six);
            if !rem.is_zero() {
                continue;
            }
            let solution = Solution::new(6, r, x, y, n as u32);
            if !(solution.holds() && solution.is_primitive()) {
                continue;
            }
            let witness = DescentWitness {
                ring: RING,
                u,
                v: vb.clone(),
                divisor: vb,
                unit_case: UnitCase::SixDescent,
                big_x: Some(big_x),
            };
            found.push(Certified { solution, witness: Some(witness) });
        }
    }
    Ok(dedup_certified(found))
}

#[derive(Debug, Clone)]
pub struct D6Report {
    pub r: u64,
    /// `NoSolutions` when `gcd(r, 6) > 1`, otherwise `Finite`.
    pub verdict: Verdict,
    pub exponents: Option<ExponentSet>,
    pub by_exponent: BTreeMap<u64, Vec<Certified>>,
    pub lifts: Vec<Solution>,
}

impl D6Report {
    pub fn solutions(&self) -> Vec<Solution> {
        let mut all: Vec<Solution> =
            self.by_exponent.values().flatten().map(|c| c.solution.clone()).chain(self.lifts.iter().cloned()).collect();
        all.sort();
        all.dedup();
        all
    }
}

pub fn solve_all_d6(r: u64) -> Result<D6Report> {
    if r == 0 {
        return Err(Error::NonPositive(r.to_string()));
    }
    for p in [2u64, 3] {
        if r % p == 0 {
            return Ok(D6Report {
                r,
                verdict: Verdict::NoSolutions(Reason::ImprimitiveR { p }),
                exponents: None,
                by_exponent: BTreeMap::new(),
                lifts: Vec::new(),
            });
        }
    }
    let exponents = exponent_set_d6(r)?;
    let mut by_exponent = BTreeMap::new();
    for &n in &exponents.primes {
        by_exponent.insert(n, solve_odd_prime_d6(r, n)?);
    }
    let mut lifts: Vec<Solution> =
        by_exponent.values().flatten().flat_map(|c| perfect_power_lifts(&c.solution)).collect();
    lifts.sort();
    lifts.dedup();
    let mut finite: Vec<Solution> = by_exponent.values().flatten().map(|c| c.solution.clone()).collect();
    finite.extend(lifts.iter().cloned());
    finite.sort();
    Ok(D6Report { r, verdict: Verdict::Finite(finite), exponents: Some(exponents), by_exponent, lifts })
}

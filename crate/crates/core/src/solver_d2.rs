//! Two squares: `(x+r)^2 + (x+2r)^2 = y^n`, i.e. `2x^2 + 6xr + 5r^2 = y^n`.
//!
//! * `n = 2`: `(2x+3r)^2 - 2y^2 = -r^2`, an infinite family in `Z[sqrt 2]`.
//! * `n = 4`: `(x+2r) + i(x+r) = eps * alpha^4`, two quartic Thue equations.
//! * odd prime `n`: `alpha^n + i conj(alpha)^n = (1+i) r`, with `u +- v | r`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expbound::{exponent_set_d2, ExponentSet};
use crate::numutil::{divisors, factorize, is_prime, IntPoly};
use crate::qring::{qconj, qmul, qnorm, qpow, unit_pow, ModQuad, QuadInt};
use crate::rootsearch::find_integer_roots;
use crate::sieve::{Reason, Verdict};
use crate::solution::{dedup_certified, perfect_power_lifts, Certified, DescentWitness, Solution, UnitCase};

pub const DEFAULT_THUE_BOUND: u64 = 1000;
pub const DEFAULT_FAMILY_K: i64 = 10;

/// `2x + 3r + y sqrt(2) = +-R^2 (1 + sqrt 2)^(2k+1)` where `R` is a product
/// of one norm-`+-q` element (or its conjugate) per prime power `q^t || r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellFamily {
    pub r: u64,
    /// `(q, element of norm +-q, multiplicity of q in r)`.
    pub prime_reps: Vec<(u64, QuadInt, u32)>,
}

/// Which conjugate of each prime representative to use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjugateChoice {
    /// Every one of the `2^s` vectors.
    All,
    /// The canonical representatives only.
    Canonical,
    /// `true` selects the conjugate of the i-th representative.
    Vector(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    pub k: i64,
    pub sign: i8,
    pub conjugates: Vec<bool>,
    pub solution: Solution,
}

fn fundamental_unit() -> QuadInt {
    QuadInt::new(1, 1, 2).expect("2 is squarefree")
}

impl PellFamily {
    /// `R` for one conjugate-choice vector.
    fn rep_product(&self, conjugates: &[bool]) -> QuadInt {
        let mut acc = QuadInt::one(2).expect("2 is squarefree");
        for ((_, rep, t), &c) in self.prime_reps.iter().zip(conjugates) {
            let base = if c { qconj(rep) } else { rep.clone() };
            acc = qmul(&acc, &qpow(&base, *t as u64)).expect("same ring");
        }
        acc
    }

    fn choice_vectors(&self, choices: &ConjugateChoice) -> Vec<Vec<bool>> {
        let s = self.prime_reps.len();
        match choices {
            ConjugateChoice::Canonical => vec![vec![false; s]],
            ConjugateChoice::Vector(v) => vec![v.clone()],
            ConjugateChoice::All => (0..1u64 << s).map(|mask| (0..s).map(|i| mask >> i & 1 == 1).collect()).collect(),
        }
    }

    /// Expand the parametrization for every `k` in range, both signs and the
    /// selected conjugate vectors.
    pub fn members(&self, k_range: RangeInclusive<i64>, choices: &ConjugateChoice) -> Vec<FamilyMember> {
        let r = BigInt::from(self.r);
        let mut out = Vec::new();
        for conjugates in self.choice_vectors(choices) {
            let rep = self.rep_product(&conjugates);
            let rep_sq = qmul(&rep, &rep).expect("same ring");
            for k in k_range.clone() {
                let unit = unit_pow(&fundamental_unit(), 2 * k + 1).expect("unit");
                let base = qmul(&rep_sq, &unit).expect("same ring");
                for sign in [1i8, -1] {
                    let elt = if sign == 1 { base.clone() } else { base.neg() };
                    let (a, b) = elt.into_parts();
                    let twice = a - &r * 3u32;
                    debug_assert!(twice.is_even());
                    let solution = Solution::new(2, self.r, twice / 2, b, 2);
                    out.push(FamilyMember { k, sign, conjugates: conjugates.clone(), solution });
                }
            }
        }
        out
    }
}

impl fmt::Display for PellFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2x + 3*{} + y*sqrt(2) = ±R^2 * (1 + sqrt(2))^(2k+1), k in Z", self.r)?;
        if self.prime_reps.is_empty() {
            return write!(f, ", R = 1");
        }
        let parts: Vec<String> =
            self.prime_reps.iter().map(|(q, rep, t)| format!("[{rep} or its conjugate]^{t} (norm ±{q})")).collect();
        write!(f, ", R = {}", parts.join(" * "))
    }
}

/// An element of norm `+-q` in `Z[sqrt 2]` with the smallest `|b|`, then `a > 0`.
pub fn pell_representation(q: u64) -> Result<QuadInt> {
    if !is_prime(q) {
        return Err(Error::InvalidArgument(format!("{q} is not prime")));
    }
    if q % 8 != 1 && q % 8 != 7 {
        return Err(Error::NoNormRepresentation(q));
    }
    let q = q as u128;
    for b in 0u128.. {
        let tb = 2 * b * b;
        for target in [q + tb, tb.wrapping_sub(q)] {
            if target > q + tb {
                continue;
            }
            let a = target.sqrt();
            if a * a == target {
                return QuadInt::new(a as u64, b as u64, 2);
            }
        }
    }
    unreachable!("a prime = +-1 mod 8 splits in Z[sqrt 2]")
}

/// Solve the `n = 2` case for one `r`.
pub fn solve_n2(r: u64) -> Result<Verdict> {
    if r == 0 {
        return Err(Error::NonPositive(r.to_string()));
    }
    if r % 2 == 0 {
        return Ok(Verdict::NoSolutions(Reason::ImprimitiveR { p: 2 }));
    }
    let fact = factorize(r as i64)?;
    if let Some(q) = fact.primes().find(|q| q % 8 == 3 || q % 8 == 5) {
        return Ok(Verdict::NoSolutions(Reason::PrimeNotSplitInZSqrt2 { q }));
    }
    let prime_reps =
        fact.factors.iter().map(|&(q, t)| Ok((q, pell_representation(q)?, t))).collect::<Result<Vec<_>>>()?;
    Ok(Verdict::Family(Box::new(PellFamily { r, prime_reps })))
}

/// Witness hits of `eps * alpha^4` for `alpha = u + iv` with `u` in `u_range`,
/// `0 <= v <= bound`, landing on some `r` in `r_range`.
fn quartic_hits(u_range: RangeInclusive<i64>, bound: i64, r_range: RangeInclusive<i64>) -> Vec<Certified> {
    let mut out = Vec::new();
    for u in u_range {
        for v in 0..=bound {
            if (u + v) % 2 == 0 || u.gcd(&v) != 1 {
                continue;
            }
            let (u2, v2, uv) = (u as i128 * u as i128, v as i128 * v as i128, u as i128 * v as i128);
            let re = u2 * u2 - 6 * u2 * v2 + v2 * v2;
            let im = 4 * uv * (u2 - v2);
            // eps * (re + i im) for eps = 1, -1, i, -i
            let variants = [
                (UnitCase::RealUnit(1), re, im),
                (UnitCase::RealUnit(-1), -re, -im),
                (UnitCase::ImaginaryUnit(1), -im, re),
                (UnitCase::ImaginaryUnit(-1), im, -re),
            ];
            for (case, p, q) in variants {
                let r = p - q;
                if r < *r_range.start() as i128 || r > *r_range.end() as i128 {
                    continue;
                }
                let x = p - 2 * r;
                let solution = Solution::new(2, r as u64, BigInt::from(x), BigInt::from(u2 + v2), 4);
                if !(solution.is_primitive() && solution.holds()) {
                    continue;
                }
                let witness = DescentWitness {
                    ring: -1,
                    u: BigInt::from(u),
                    v: BigInt::from(v),
                    divisor: BigInt::from(r),
                    unit_case: case,
                    big_x: None,
                };
                out.push(Certified { solution, witness: Some(witness) });
            }
        }
    }
    out
}

/// All `n = 4` solutions whose descent element has `|u|, |v| <= bound`.
///
/// Exhaustive over the box, which is a verification device and not a proof
/// of completeness.
pub fn solve_n4(r: u64, bound: u64) -> Vec<Certified> {
    let b = bound as i64;
    let hits = (1..=b).into_par_iter().flat_map_iter(|u| quartic_hits(u..=u, b, r as i64..=r as i64)).collect();
    dedup_certified(hits)
}

/// `n = 4` solutions for every `r` in range from a single scan of the box.
pub fn solve_n4_range(r_range: RangeInclusive<u64>, bound: u64) -> BTreeMap<u64, Vec<Certified>> {
    let b = bound as i64;
    let rr = *r_range.start() as i64..=*r_range.end() as i64;
    let hits: Vec<Certified> = (1..=b).into_par_iter().flat_map_iter(|u| quartic_hits(u..=u, b, rr.clone())).collect();
    let mut by_r: BTreeMap<u64, Vec<Certified>> = BTreeMap::new();
    for h in hits {
        by_r.entry(h.solution.r).or_default().push(h);
    }
    by_r.into_iter().map(|(r, v)| (r, dedup_certified(v))).collect()
}

fn binomials(n: u64) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=n {
        let prev = row[k as usize - 1].clone();
        row.push(prev * (n - k + 1) / k);
    }
    row
}

pub(crate) fn require_odd_prime(n: u64) -> Result<()> {
    if n == 2 || !is_prime(n) {
        return Err(Error::NotOddPrime(n.to_string()));
    }
    Ok(())
}

/// `Re + Im` of `(t + v(s + i))^n - r` as a polynomial in `v`.
fn descent_poly_d2(t: i64, s: i64, n: u64, r: u64) -> IntPoly {
    let binom = binomials(n);
    let omega = QuadInt::gaussian(s, 1);
    let tb = BigInt::from(t);
    let mut omega_k = QuadInt::gaussian(1, 0);
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let t_pow = num_traits::pow(tb.clone(), (n - k) as usize);
        coeffs.push(&binom[k as usize] * t_pow * (omega_k.a() + omega_k.b()));
        omega_k = qmul(&omega_k, &omega).expect("gaussian");
    }
    coeffs[0] -= BigInt::from(r);
    IntPoly::new(coeffs)
}

/// All primitive solutions for one odd prime exponent.
pub fn solve_odd_prime(r: u64, n: u64) -> Result<Vec<Certified>> {
    require_odd_prime(n)?;
    if r == 0 {
        return Err(Error::NonPositive(r.to_string()));
    }
    if r % 2 == 0 {
        return Ok(Vec::new());
    }
    let (s, case) = if n % 4 == 1 { (-1i64, UnitCase::SumDivides) } else { (1, UnitCase::DifferenceDivides) };
    let rb = BigInt::from(r);
    let mut found = Vec::new();
    for t in divisors(r as i64, true)? {
        let residue_ok = |z: u64, ell: u64| {
            let tm = t.rem_euclid(ell as i64) as u64;
            let sz = if s == 1 { z } else { (ell - z) % ell };
            let alpha = ModQuad { a: (tm + sz) % ell, b: z };
            let p = alpha.pow(n, ell - 1, ell);
            (p.a + p.b) % ell == r % ell
        };
        let roots = find_integer_roots(residue_ok, || descent_poly_d2(t, s, n, r), n as usize);
        for v in roots {
            let u = BigInt::from(t) + &v * s;
            let alpha = QuadInt::gaussian(u.clone(), v.clone());
            let (a, b) = qpow(&alpha, n).into_parts();
            if &a + &b != rb {
                continue;
            }
            let twice = &a - &b - &rb * 3u32;
            if twice.is_odd() {
                continue;
            }
            let solution = Solution::new(2, r, twice / 2, qnorm(&alpha), n as u32);
            if !(solution.holds() && solution.is_primitive()) {
                continue;
            }
            let witness = DescentWitness { ring: -1, u, v, divisor: BigInt::from(t), unit_case: case, big_x: None };
            found.push(Certified { solution, witness: Some(witness) });
        }
    }
    Ok(dedup_certified(found))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub thue_bound: u64,
    pub family_k: i64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { thue_bound: DEFAULT_THUE_BOUND, family_k: DEFAULT_FAMILY_K }
    }
}

/// Everything known for `d = 2` and one `r`.
#[derive(Debug, Clone)]
pub struct D2Report {
    pub r: u64,
    pub n2: Verdict,
    /// Materialized family members for `|k| <= family_k`.
    pub n2_members: Vec<Solution>,
    pub n4: Vec<Certified>,
    pub exponents: ExponentSet,
    pub odd: BTreeMap<u64, Vec<Certified>>,
    /// Composite exponents recovered from perfect-power `y`.
    pub lifts: Vec<Solution>,
}

impl D2Report {
    /// Every finite-case solution (`n = 4`, odd primes, lifts), sorted.
    pub fn solutions(&self) -> Vec<Solution> {
        let mut all: Vec<Solution> = self
            .n4
            .iter()
            .chain(self.odd.values().flatten())
            .map(|c| c.solution.clone())
            .chain(self.lifts.iter().cloned())
            .collect();
        all.sort();
        all.dedup();
        all
    }
}

pub fn solve_all_d2(r: u64, opts: &SolveOptions) -> Result<D2Report> {
    let n2 = solve_n2(r)?;
    let n2_members = match &n2 {
        Verdict::Family(fam) => {
            let mut m: Vec<Solution> = fam
                .members(-opts.family_k..=opts.family_k, &ConjugateChoice::All)
                .into_iter()
                .map(|m| m.solution)
                .collect();
            m.sort();
            m.dedup();
            m
        }
        _ => Vec::new(),
    };
    let n4 = solve_n4(r, opts.thue_bound);
    let exponents = exponent_set_d2(r)?;
    let mut odd = BTreeMap::new();
    for &n in &exponents.primes {
        odd.insert(n, solve_odd_prime(r, n)?);
    }
    let mut lifts: Vec<Solution> =
        n4.iter().chain(odd.values().flatten()).flat_map(|c| perfect_power_lifts(&c.solution)).collect();
    lifts.sort();
    lifts.dedup();
    Ok(D2Report { r, n2, n2_members, n4, exponents, odd, lifts })
}

/// `u^4 - 4u^3v - 6u^2v^2 + 4uv^3 + v^4` (`eps = +-1`) or the form with the
/// odd-degree signs flipped (`eps = +-i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThueForm {
    pub coeffs: [i64; 5],
}

impl ThueForm {
    pub const REAL_UNIT: ThueForm = ThueForm { coeffs: [1, -4, -6, 4, 1] };
    pub const IMAGINARY_UNIT: ThueForm = ThueForm { coeffs: [1, 4, -6, -4, 1] };

    /// `sum c_k u^(4-k) v^k`.
    pub fn eval(&self, u: &BigInt, v: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| BigInt::from(*c) * num_traits::pow(u.clone(), 4 - k) * num_traits::pow(v.clone(), k))
            .sum()
    }

    pub fn for_case(case: UnitCase) -> Option<ThueForm> {
        match case {
            UnitCase::RealUnit(_) => Some(Self::REAL_UNIT),
            UnitCase::ImaginaryUnit(_) => Some(Self::IMAGINARY_UNIT),
            _ => None,
        }
    }
}

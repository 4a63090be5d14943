//! Candidate prime exponents for a given `r`, and the Lehmer sequences whose
//! primitive divisors bound them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numutil::{factorize, is_probable_prime_big, legendre, odd_prime_factors};

/// Where a candidate exponent came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Base,
    /// `p | q - (-c/q)` for the prime `q | r`.
    FromPrime(u64),
}

/// The finite set of odd prime exponents that survive the primitive-divisor
/// argument for one `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentSet {
    pub d: u32,
    pub r: u64,
    pub primes: BTreeSet<u64>,
    pub provenance: BTreeMap<u64, Vec<Provenance>>,
}

impl ExponentSet {
    fn build(d: u32, r: u64, base: &[u64], c: i64, skip: impl Fn(u64) -> bool) -> Result<Self> {
        let mut provenance: BTreeMap<u64, Vec<Provenance>> = BTreeMap::new();
        for &p in base {
            provenance.entry(p).or_default().push(Provenance::Base);
        }
        for q in factorize(r as i64)?.primes() {
            if q == 2 || skip(q) {
                continue;
            }
            let m = (q as i64 - legendre(-c, q)? as i64) as u64;
            for p in odd_prime_factors(m) {
                provenance.entry(p).or_default().push(Provenance::FromPrime(q));
            }
        }
        Ok(ExponentSet { d, r, primes: provenance.keys().copied().collect(), provenance })
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.contains(&n)
    }
}

/// `{3, 5}` together with every odd prime dividing `q - (-1/q)` for an odd
/// prime `q | r`.
pub fn exponent_set_d2(r: u64) -> Result<ExponentSet> {
    if r == 0 {
        return Err(Error::NonPositive(r.to_string()));
    }
    ExponentSet::build(2, r, &[3, 5], 1, |_| false)
}

/// `{3, 5, 7, 11, 13}` together with every odd prime dividing
/// `q - (-105/q)` for a prime `q | r` with `q` not dividing 210.
pub fn exponent_set_d6(r: u64) -> Result<ExponentSet> {
    if r == 0 {
        return Err(Error::NonPositive(r.to_string()));
    }
    if r.gcd(&6) != 1 {
        return Err(Error::NotCoprimeToSix(r));
    }
    ExponentSet::build(6, r, &[3, 5, 7, 11, 13], 105, |q| 210 % q == 0)
}

/// `E = (alpha + beta)^2` and `Q = alpha * beta` of a Lehmer pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LehmerParams {
    e: BigInt,
    q: BigInt,
}

impl LehmerParams {
    pub fn new(e: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (e, q) = (e.into(), q.into());
        let fail = |why| Error::DegenerateLehmer { e: e.to_string(), q: q.to_string(), why };
        if e.is_zero() || q.is_zero() {
            return Err(fail("E and Q must be nonzero"));
        }
        if !e.gcd(&q).is_one() {
            return Err(fail("E and Q must be coprime"));
        }
        // alpha/beta is a root of unity exactly when E/Q is 0, 1, 2, 3 or 4
        if (1..=4).any(|k| e == &q * k) {
            return Err(fail("alpha/beta is a root of unity"));
        }
        Ok(LehmerParams { e, q })
    }

    pub fn e(&self) -> &BigInt {
        &self.e
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// `(alpha^2 - beta^2)^2 = E (E - 4Q)`.
    pub fn discriminant_factor(&self) -> BigInt {
        &self.e * (&self.e - &self.q * 4)
    }

    /// `U_0 .. U_n` of the Lucas sequence with `P = sqrt(E)`, each stored as
    /// `c0 + c1 * P`.
    fn lucas(&self, n: u64) -> Vec<(BigInt, BigInt)> {
        let mut seq = vec![(BigInt::zero(), BigInt::zero()), (BigInt::one(), BigInt::zero())];
        for k in 2..=n as usize {
            let (c0, c1) = &seq[k - 1];
            let (d0, d1) = &seq[k - 2];
            // P * (c0 + c1 P) = c1 E + c0 P
            let next = (c1 * &self.e - &self.q * d0, c0 - &self.q * d1);
            seq.push(next);
        }
        seq.truncate(n as usize + 1);
        seq
    }

    fn descale(k: u64, term: &(BigInt, BigInt)) -> BigInt {
        if k % 2 == 1 {
            debug_assert!(term.1.is_zero());
            term.0.clone()
        } else {
            debug_assert!(term.0.is_zero());
            term.1.clone()
        }
    }
}

/// The Lehmer term `u~_n`: `(a^n - b^n)/(a - b)` for odd `n`, and
/// `(a^n - b^n)/(a^2 - b^2)` for even `n`.
pub fn lehmer_term(params: &LehmerParams, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidArgument("Lehmer index must be positive".into()));
    }
    let seq = params.lucas(n);
    Ok(LehmerParams::descale(n, &seq[n as usize]))
}

/// Whether `u~_n` has a prime divisor not dividing `E(E-4Q) u~_1 ... u~_{n-1}`,
/// with such a prime as witness when one can be extracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveDivisor {
    pub exists: bool,
    /// Product of the prime powers of `u~_n` that are primitive.
    pub primitive_part: BigInt,
    pub witness: Option<BigInt>,
}

pub fn primitive_divisor_exists(params: &LehmerParams, n: u64) -> Result<PrimitiveDivisor> {
    if n < 2 {
        return Err(Error::InvalidArgument("primitive divisors need n >= 2".into()));
    }
    let seq = params.lucas(n);
    let term = LehmerParams::descale(n, &seq[n as usize]);
    if term.is_zero() {
        return Err(Error::InvalidArgument(format!("u~_{n} vanishes")));
    }
    let mut earlier = params.discriminant_factor();
    for k in 1..n {
        earlier *= LehmerParams::descale(k, &seq[k as usize]);
    }
    let mut rest = term.abs();
    loop {
        let g = rest.gcd(&earlier);
        if g.is_one() {
            break;
        }
        rest /= g;
    }
    let exists = !rest.is_one();
    let witness = if exists { smallest_prime_factor(&rest) } else { None };
    Ok(PrimitiveDivisor { exists, primitive_part: rest, witness })
}

/// Smallest prime factor by trial division to `10^6`, then Pollard's rho.
fn smallest_prime_factor(m: &BigInt) -> Option<BigInt> {
    if m <= &BigInt::one() {
        return None;
    }
    let rest = m.clone();
    let mut p = 2u64;
    while p < 1_000_000 {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            return Some(rest);
        }
        if (&rest % &pb).is_zero() {
            return Some(pb);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut found = Vec::new();
    split_prime_factors(rest, &mut found);
    found.into_iter().min()
}

fn split_prime_factors(m: BigInt, out: &mut Vec<BigInt>) {
    if m.is_one() {
        return;
    }
    if is_probable_prime_big(&m) {
        out.push(m);
        return;
    }
    let f = pollard_rho(&m);
    let other = &m / &f;
    split_prime_factors(f, out);
    split_prime_factors(other, out);
}

fn pollard_rho(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y, mut g) = (BigInt::from(2), BigInt::from(2), BigInt::one());
        while g.is_one() {
            x = f(&x);
            y = f(&f(&y));
            g = (&x - &y).abs().gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1;
        if c.to_u32().unwrap_or(u32::MAX) > 1000 {
            return n.clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn d2_examples() {
        assert_eq!(exponent_set_d2(1).unwrap().primes, set(&[3, 5]));
        assert_eq!(exponent_set_d2(3).unwrap().primes, set(&[3, 5]));
        let b = exponent_set_d2(11).unwrap();
        assert_eq!(b.primes, set(&[3, 5]));
        assert_eq!(b.provenance[&3], vec![Provenance::Base, Provenance::FromPrime(11)]);
        // 29 - 1 = 28 = 4 * 7
        assert_eq!(exponent_set_d2(29).unwrap().primes, set(&[3, 5, 7]));
    }

    #[test]
    fn d6_examples() {
        assert_eq!(exponent_set_d6(55).unwrap().primes, set(&[3, 5, 7, 11, 13]));
        assert_eq!(exponent_set_d6(13).unwrap().primes, set(&[3, 5, 7, 11, 13]));
        assert_eq!(exponent_set_d6(1).unwrap().primes, set(&[3, 5, 7, 11, 13]));
        assert_eq!(exponent_set_d6(3), Err(Error::NotCoprimeToSix(3)));
        assert_eq!(exponent_set_d6(10), Err(Error::NotCoprimeToSix(10)));
        // 2933 = 7 * 419; (-105/419) decides 418 = 2*11*19 or 420 = 4*3*5*7
        let b = exponent_set_d6(2933).unwrap();
        assert!(b.contains(7));
        let l = legendre(-105, 419).unwrap();
        let extra = odd_prime_factors((419 - l as i64) as u64);
        for p in extra {
            assert!(b.contains(p));
        }
    }

    #[test]
    fn lehmer_small_terms() {
        for (e, q) in [(1i64, -1i64), (5, 1), (-7, 3), (13, -2)] {
            let p = LehmerParams::new(e, q).unwrap();
            assert_eq!(lehmer_term(&p, 1).unwrap(), BigInt::one());
            assert_eq!(lehmer_term(&p, 2).unwrap(), BigInt::one());
            assert_eq!(lehmer_term(&p, 3).unwrap(), BigInt::from(e - q));
            assert_eq!(lehmer_term(&p, 4).unwrap(), BigInt::from(e - 2 * q));
            assert_eq!(lehmer_term(&p, 5).unwrap(), BigInt::from(e * e - 3 * e * q + q * q));
        }
    }

    #[test]
    fn fibonacci_pair() {
        let p = LehmerParams::new(1, -1).unwrap();
        let fib: Vec<i64> = vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        for (k, f) in fib.iter().enumerate() {
            assert_eq!(lehmer_term(&p, k as u64 + 1).unwrap(), BigInt::from(*f));
        }
        assert!(!primitive_divisor_exists(&p, 12).unwrap().exists);
        let p17 = primitive_divisor_exists(&p, 17).unwrap();
        assert!(p17.exists);
        assert_eq!(p17.witness, Some(BigInt::from(1597)));
    }

    #[test]
    fn degenerate_params() {
        assert!(LehmerParams::new(0, 1).is_err());
        assert!(LehmerParams::new(1, 0).is_err());
        assert!(LehmerParams::new(4, 2).is_err());
        for k in 1..=4 {
            assert!(LehmerParams::new(k, 1).is_err());
            assert!(LehmerParams::new(-k, -1).is_err());
        }
        assert!(LehmerParams::new(5, 1).is_ok());
    }

    fn prime_factors_brute(m: &BigInt) -> Vec<u64> {
        let mut m = m.abs().to_u64().unwrap();
        let mut out = Vec::new();
        let mut p = 2;
        while m > 1 {
            if m % p == 0 {
                out.push(p);
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 1;
        }
        out
    }

    #[test]
    fn primitive_flag_matches_brute_force() {
        let p = LehmerParams::new(5, 1).unwrap();
        for n in 2..=7u64 {
            let term = lehmer_term(&p, n).unwrap();
            let mut earlier = p.discriminant_factor();
            for k in 1..n {
                earlier *= lehmer_term(&p, k).unwrap();
            }
            let brute = prime_factors_brute(&term).into_iter().any(|q| !(&earlier % BigInt::from(q)).is_zero());
            assert_eq!(primitive_divisor_exists(&p, n).unwrap().exists, brute, "n={n}");
        }
    }
}

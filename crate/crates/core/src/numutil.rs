//! Exact integer number theory: factoring, divisors, residue symbols,
//! roots and integer root finding for integer polynomials.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Canonical prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    /// `(prime, multiplicity)` pairs sorted by prime.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn product(factors: &[(u64, u32)]) -> u64 {
        factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin over big integers with the first twenty prime bases.
/// Deterministic below 3.3e24; a strong probable-prime test above.
pub fn is_probable_prime_big(n: &BigInt) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    if n.is_negative() || n.is_even() {
        return false;
    }
    const BASES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &BASES {
        let a = BigInt::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division; every reported factor is
/// certified with [`is_prime`].
pub fn factorize(m: i64) -> Result<Factorization> {
    if m <= 0 {
        return Err(Error::NonPositive(m.to_string()));
    }
    let value = m as u64;
    let mut rest = value;
    let mut factors = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    let mut p = 5u64;
    while p * p <= rest {
        push(p, &mut rest);
        push(p + 2, &mut rest);
        p += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    debug_assert!(factors.iter().all(|&(p, _)| is_prime(p)));
    Ok(Factorization { value, factors })
}

/// Positive divisors in increasing order, or both signs when `signed`.
pub fn divisors(m: i64, signed: bool) -> Result<Vec<i64>> {
    let fact = factorize(m)?;
    let mut divs = vec![1i64];
    for &(p, e) in &fact.factors {
        let len = divs.len();
        let mut pk = 1i64;
        for _ in 0..e {
            pk *= p as i64;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    if signed {
        let mut all: Vec<i64> = divs.iter().rev().map(|d| -d).collect();
        all.extend(divs);
        return Ok(all);
    }
    Ok(divs)
}

/// Legendre symbol `(a/p)` by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p.to_string()));
    }
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(a, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// Exponent of the prime `p` in `m`.
pub fn valuation(m: &BigInt, p: u64) -> Result<u32> {
    if m.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let p = BigInt::from(p);
    let mut m = m.abs();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Ok(e);
        }
        m = q;
        e += 1;
    }
}

/// `(floor(sqrt(m)), m is a perfect square)`.
pub fn isqrt(m: &BigInt) -> Result<(BigInt, bool)> {
    if m.is_negative() {
        return Err(Error::NegativeSqrt(m.to_string()));
    }
    let root = m.sqrt();
    let exact = &root * &root == *m;
    Ok((root, exact))
}

/// Returns `(b, e)` with `b^e = y` and `e` maximal. Negative `y` only admits
/// odd exponents.
pub fn perfect_power(y: &BigInt) -> Result<(BigInt, u32)> {
    let mag = y.abs();
    if mag < BigInt::from(2) {
        return Err(Error::TrivialPower(y.to_string()));
    }
    let negative = y.is_negative();
    let max_e = mag.bits() as u32;
    for e in (2..=max_e).rev() {
        if negative && e % 2 == 0 {
            continue;
        }
        let b = mag.nth_root(e);
        if b < BigInt::from(2) {
            continue;
        }
        if num_traits::pow(b.clone(), e as usize) == mag {
            return Ok((if negative { -b } else { b }, e));
        }
    }
    Ok((y.clone(), 1))
}

/// Integer polynomial; `coeffs[i]` multiplies `u^i`. The zero polynomial has
/// no coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `(u - r_1)(u - r_2)...`
    pub fn from_roots(roots: &[BigInt]) -> Self {
        roots.iter().fold(IntPoly::from_i64(&[1]), |acc, r| acc.mul(&IntPoly::new(vec![-r, BigInt::one()])))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, u: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Residue of `p(u)` modulo `m`, with coefficients reduced on the fly.
    pub fn eval_mod(&self, u: u64, m: u64) -> u64 {
        let mb = BigInt::from(m);
        let mut acc = 0u64;
        for c in self.coeffs.iter().rev() {
            let c = c.mod_floor(&mb).to_u64().unwrap_or(0);
            acc = ((acc as u128 * u as u128 + c as u128) % m as u128) as u64;
        }
        acc
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*u")?,
                _ => write!(f, "{a}*u^{i}")?,
            }
        }
        Ok(())
    }
}

/// A power of two bounding the absolute value of every complex root
/// (Fujiwara's bound, rounded up through bit lengths).
pub fn root_bound(p: &IntPoly) -> Result<BigInt> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    let lead_bits = p.coeffs[n].bits() as i64;
    let mut e = 0i64;
    for j in 1..=n {
        let a = &p.coeffs[n - j];
        if a.is_zero() {
            continue;
        }
        let need = a.bits() as i64 - lead_bits + 1;
        if need > 0 {
            e = e.max(Integer::div_ceil(&need, &(j as i64)));
        }
    }
    Ok(BigInt::one() << (e as usize + 1))
}

/// Zero of `p` at an integer, or a sign change between `c` and `c + 1`.
enum Crossing {
    Zero(BigInt),
    Bracket(BigInt),
}

/// Crossings of `p` in each gap of `breaks`, where `p` is monotone on every
/// gap wider than one.
fn crossings(p: &IntPoly, breaks: &[BigInt]) -> Vec<Crossing> {
    let values: Vec<BigInt> = breaks.iter().map(|b| p.eval(b)).collect();
    let mut out = Vec::new();
    for (b, v) in breaks.iter().zip(&values) {
        if v.is_zero() {
            out.push(Crossing::Zero(b.clone()));
        }
    }
    for i in 0..breaks.len().saturating_sub(1) {
        let (sa, sb) = (values[i].sign(), values[i + 1].sign());
        if sa == Sign::NoSign || sb == Sign::NoSign || sa == sb {
            continue;
        }
        let (mut lo, mut hi) = (breaks[i].clone(), breaks[i + 1].clone());
        let mut zero = None;
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            let vm = p.eval(&mid);
            match vm.sign() {
                Sign::NoSign => {
                    zero = Some(mid);
                    break;
                }
                s if s == sa => lo = mid,
                _ => hi = mid,
            }
        }
        out.push(match zero {
            Some(z) => Crossing::Zero(z),
            None => Crossing::Bracket(lo),
        });
    }
    out
}

/// All integer roots of `p`, sorted and without repetition.
///
/// The search interval comes from [`root_bound`]. It is split at the
/// (integer-bracketed) sign changes of every derivative, from the highest
/// order down, so that `p` is monotone on each remaining piece; each piece is
/// then bisected with exact evaluation.
pub fn integer_roots(p: &IntPoly) -> Result<Vec<BigInt>> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let bound = root_bound(p)?;
    let mut chain = vec![p.clone()];
    while chain.last().and_then(IntPoly::degree).unwrap_or(0) > 1 {
        let next = chain.last().map(IntPoly::derivative).unwrap_or_else(|| IntPoly::new(vec![]));
        chain.push(next);
    }
    let mut breaks = vec![-bound.clone(), bound.clone()];
    for q in chain.iter().skip(1).rev() {
        for c in crossings(q, &breaks) {
            match c {
                Crossing::Zero(z) => breaks.push(z),
                Crossing::Bracket(lo) => {
                    breaks.push(&lo + 1);
                    breaks.push(lo);
                }
            }
        }
        breaks.sort();
        breaks.dedup();
    }
    let mut roots: Vec<BigInt> = crossings(p, &breaks)
        .into_iter()
        .filter_map(|c| match c {
            Crossing::Zero(z) => Some(z),
            Crossing::Bracket(_) => None,
        })
        .filter(|z| p.eval(z).is_zero())
        .collect();
    roots.sort();
    roots.dedup();
    Ok(roots)
}

/// The first `count` primes.
pub fn small_primes(count: usize) -> Vec<u64> {
    (2u64..).filter(|&n| is_prime(n)).take(count).collect()
}

/// Odd prime factors of `m` (empty for `m` in {0, 1, 2}).
pub fn odd_prime_factors(m: u64) -> Vec<u64> {
    if m == 0 {
        return Vec::new();
    }
    factorize(m as i64).map(|f| f.primes().filter(|&p| p != 2).collect()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn trial_division_oracle(mut m: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while m > 1 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(9071).unwrap().factors, trial_division_oracle(9071));
        assert_eq!(factorize(9071).unwrap().factors, vec![(47, 1), (193, 1)]);
        assert_eq!(factorize(10000).unwrap().factors, vec![(2, 4), (5, 4)]);
        assert!(factorize(0).is_err());
        assert!(factorize(-5).is_err());
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(6, false).unwrap(), vec![1, 2, 3, 6]);
        assert_eq!(divisors(13, true).unwrap(), vec![-13, -1, 1, 13]);
        assert_eq!(divisors(1, true).unwrap(), vec![-1, 1]);
        assert!(divisors(0, false).is_err());
    }

    fn legendre_oracle(a: i64, p: u64) -> i8 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(-1, 13).unwrap(), 1);
        assert_eq!(legendre(-105, 11).unwrap(), legendre_oracle(-105, 11));
        assert_eq!(legendre(-105, 11).unwrap(), 1);
        assert_eq!(legendre(2, 5).unwrap(), -1);
        assert_eq!(legendre(10, 5).unwrap(), 0);
        assert!(legendre(3, 2).is_err());
        assert!(legendre(3, 9).is_err());
        for p in [3u64, 5, 7, 11, 13, 97, 101] {
            for a in -50..50 {
                assert_eq!(legendre(a, p).unwrap(), legendre_oracle(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&big(8), 2).unwrap(), 3);
        assert_eq!(valuation(&big(9), 3).unwrap(), 2);
        assert_eq!(valuation(&big(7), 2).unwrap(), 0);
        assert_eq!(valuation(&big(-48), 2).unwrap(), 4);
        assert_eq!(valuation(&big(0), 2), Err(Error::ZeroValuation));
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&big(28561)).unwrap(), (big(169), true));
        assert_eq!(isqrt(&big(2)).unwrap(), (big(1), false));
        assert_eq!(isqrt(&big(0)).unwrap(), (big(0), true));
        assert!(isqrt(&big(-1)).is_err());
    }

    #[test]
    fn perfect_power_examples() {
        assert_eq!(perfect_power(&big(125)).unwrap(), (big(5), 3));
        assert_eq!(perfect_power(&big(28561)).unwrap(), (big(13), 4));
        assert_eq!(perfect_power(&big(19)).unwrap(), (big(19), 1));
        assert_eq!(perfect_power(&big(64)).unwrap(), (big(2), 6));
        assert_eq!(perfect_power(&big(-64)).unwrap(), (big(-4), 3));
        assert_eq!(perfect_power(&big(-2)).unwrap(), (big(-2), 1));
        assert!(perfect_power(&big(1)).is_err());
        assert!(perfect_power(&big(-1)).is_err());
    }

    #[test]
    fn perfect_power_exponent_divisible() {
        for b in 2i64..=50 {
            for e in 2u32..=6 {
                let y = num_traits::pow(big(b), e as usize);
                let (base, exp) = perfect_power(&y).unwrap();
                assert_eq!(exp % e, 0, "b={b} e={e}");
                assert_eq!(num_traits::pow(base, exp as usize), y);
            }
        }
    }

    #[test]
    fn integer_roots_examples() {
        let p = IntPoly::from_i64(&[-9, 0, 1]);
        assert_eq!(integer_roots(&p).unwrap(), vec![big(-3), big(3)]);
        let p = IntPoly::from_i64(&[27, 0, -3]);
        assert_eq!(integer_roots(&p).unwrap(), vec![big(-3), big(3)]);
        let p = IntPoly::from_i64(&[1, 0, 1]);
        assert!(integer_roots(&p).unwrap().is_empty());
        assert_eq!(integer_roots(&IntPoly::new(vec![])), Err(Error::ZeroPolynomial));
        assert!(integer_roots(&IntPoly::from_i64(&[5])).unwrap().is_empty());
    }

    #[test]
    fn integer_roots_multiple_and_close() {
        // (u - 2)^2 (u + 7) touches zero at 2 without a sign change
        let p = IntPoly::from_roots(&[big(2), big(2), big(-7)]);
        assert_eq!(integer_roots(&p).unwrap(), vec![big(-7), big(2)]);
        // consecutive integer roots
        let p = IntPoly::from_roots(&[big(0), big(1), big(2), big(3)]);
        assert_eq!(integer_roots(&p).unwrap(), vec![big(0), big(1), big(2), big(3)]);
        // huge constant term: (u - 1)(u - 10^30)
        let huge = num_traits::pow(big(10), 30);
        let p = IntPoly::from_roots(&[big(1), huge.clone()]);
        assert_eq!(integer_roots(&p).unwrap(), vec![big(1), huge]);
        // two real roots in (0, 1) plus an integer root: 100u^2 - 100u + 21 = (10u-3)(10u-7)
        let p = IntPoly::from_i64(&[21, -100, 100]).mul(&IntPoly::from_i64(&[-1, 1]));
        assert_eq!(integer_roots(&p).unwrap(), vec![big(1)]);
    }

    #[test]
    fn root_bound_covers_roots() {
        let p = IntPoly::from_roots(&[big(-1000), big(3), big(999)]);
        assert!(root_bound(&p).unwrap() >= big(1000));
    }

    #[test]
    fn primality() {
        let sieve: Vec<u64> = (0..2000)
            .filter(|&n| trial_division_oracle(n).len() == 1 && trial_division_oracle(n)[0].1 == 1 && n > 1)
            .collect();
        let mr: Vec<u64> = (0..2000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
        assert!(is_probable_prime_big(&"170141183460469231731687303715884105727".parse().unwrap()));
        assert!(!is_probable_prime_big(&"170141183460469231731687303715884105729".parse().unwrap()));
    }
}

//! Exact arithmetic in `Z[sqrt(D)]` for squarefree `D`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// `a + b*sqrt(D)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    a: BigInt,
    b: BigInt,
    d: i64,
}

fn is_squarefree(d: i64) -> bool {
    let m = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl QuadInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::BadRingTag(d));
        }
        Ok(QuadInt { a: a.into(), b: b.into(), d })
    }

    /// Gaussian integer `a + b*i`.
    pub fn gaussian(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        QuadInt { a: a.into(), b: b.into(), d: -1 }
    }

    pub fn one(d: i64) -> Result<Self> {
        Self::new(1, 0, d)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn into_parts(self) -> (BigInt, BigInt) {
        (self.a, self.b)
    }

    pub fn neg(&self) -> Self {
        QuadInt { a: -&self.a, b: -&self.b, d: self.d }
    }

    /// Multiply by a rational integer.
    pub fn scale(&self, k: &BigInt) -> Self {
        QuadInt { a: &self.a * k, b: &self.b * k, d: self.d }
    }

    fn mul_unchecked(&self, other: &QuadInt) -> QuadInt {
        let d = BigInt::from(self.d);
        QuadInt {
            a: &self.a * &other.a + d * &self.b * &other.b,
            b: &self.a * &other.b + &self.b * &other.a,
            d: self.d,
        }
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = if self.d == -1 { "i".to_string() } else { format!("sqrt({})", self.d) };
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{} {} {}{}", self.a, sign, self.b.abs(), root)
    }
}

pub fn qmul(x: &QuadInt, y: &QuadInt) -> Result<QuadInt> {
    if x.d != y.d {
        return Err(Error::RingMismatch(x.d, y.d));
    }
    Ok(x.mul_unchecked(y))
}

pub fn qadd(x: &QuadInt, y: &QuadInt) -> Result<QuadInt> {
    if x.d != y.d {
        return Err(Error::RingMismatch(x.d, y.d));
    }
    Ok(QuadInt { a: &x.a + &y.a, b: &x.b + &y.b, d: x.d })
}

pub fn qconj(x: &QuadInt) -> QuadInt {
    QuadInt { a: x.a.clone(), b: -&x.b, d: x.d }
}

/// `a^2 - D b^2`.
pub fn qnorm(x: &QuadInt) -> BigInt {
    &x.a * &x.a - BigInt::from(x.d) * &x.b * &x.b
}

/// Square-and-multiply power.
pub fn qpow(x: &QuadInt, n: u64) -> QuadInt {
    let mut acc = QuadInt { a: BigInt::one(), b: BigInt::zero(), d: x.d };
    let mut base = x.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.mul_unchecked(&base);
        }
        n >>= 1;
        if n > 0 {
            base = base.mul_unchecked(&base);
        }
    }
    acc
}

/// Integer power of a unit (norm +-1), negative exponents included.
pub fn unit_pow(u: &QuadInt, k: i64) -> Result<QuadInt> {
    let norm = qnorm(u);
    if norm.abs() != BigInt::one() {
        return Err(Error::InvalidArgument(format!("{u} is not a unit")));
    }
    if k >= 0 {
        return Ok(qpow(u, k as u64));
    }
    // u^{-1} = conj(u) / norm(u)
    let inv = qconj(u).scale(&norm);
    Ok(qpow(&inv, k.unsigned_abs()))
}

/// `a + b*sqrt(D)` with coordinates reduced modulo a small `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ModQuad {
    pub a: u64,
    pub b: u64,
}

impl ModQuad {
    /// `d` is the ring tag reduced mod `m`.
    fn mul(self, o: ModQuad, d: u64, m: u64) -> ModQuad {
        let m128 = m as u128;
        let a = (self.a as u128 * o.a as u128 % m128 + (self.b as u128 * o.b as u128 % m128) * d as u128) % m128;
        let b = (self.a as u128 * o.b as u128 + self.b as u128 * o.a as u128) % m128;
        ModQuad { a: a as u64, b: b as u64 }
    }

    pub fn pow(self, mut n: u64, d: u64, m: u64) -> ModQuad {
        let mut acc = ModQuad { a: 1 % m, b: 0 };
        let mut base = self;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base, d, m);
            }
            base = base.mul(base, d, m);
            n >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64, d: i64) -> QuadInt {
        QuadInt::new(a, b, d).unwrap()
    }

    #[test]
    fn qmul_examples() {
        assert_eq!(qmul(&q(2, 3, -1), &q(2, 3, -1)).unwrap(), q(-5, 12, -1));
        assert_eq!(qmul(&q(1, 1, 2), &q(1, -1, 2)).unwrap(), q(-1, 0, 2));
        assert_eq!(qmul(&q(-96, 6, -105), &q(-3, -1, -105)).unwrap(), q(918, 78, -105));
        assert_eq!(qmul(&q(1, 1, 2), &q(1, 1, -1)), Err(Error::RingMismatch(2, -1)));
    }

    #[test]
    fn qconj_examples() {
        assert_eq!(qconj(&q(2, 3, -1)), q(2, -3, -1));
        assert_eq!(qconj(&q(5, 0, 2)), q(5, 0, 2));
        assert_eq!(qconj(&q(-3, -1, -105)), q(-3, 1, -105));
    }

    #[test]
    fn qnorm_examples() {
        assert_eq!(qnorm(&q(3, 1, 2)), BigInt::from(7));
        assert_eq!(qnorm(&q(2, 3, -1)), BigInt::from(13));
        assert_eq!(qnorm(&q(-3, -1, -105)), BigInt::from(114));
    }

    #[test]
    fn qpow_examples() {
        assert_eq!(qpow(&q(1, 1, 2), 3), q(7, 5, 2));
        assert_eq!(qpow(&q(2, 1, -1), 5), q(-38, 41, -1));
        assert_eq!(qpow(&q(17, -4, -105), 0), q(1, 0, -105));
    }

    #[test]
    fn unit_inverse() {
        assert_eq!(unit_pow(&q(1, 1, 2), -1).unwrap(), q(-1, 1, 2));
        assert_eq!(unit_pow(&q(1, 1, 2), -3).unwrap(), qconj(&qpow(&q(1, 1, 2), 3)).neg());
        assert!(unit_pow(&q(3, 1, 2), -1).is_err());
    }

    #[test]
    fn bad_tags() {
        assert_eq!(QuadInt::new(1, 1, 0), Err(Error::BadRingTag(0)));
        assert_eq!(QuadInt::new(1, 1, 1), Err(Error::BadRingTag(1)));
        assert_eq!(QuadInt::new(1, 1, 12), Err(Error::BadRingTag(12)));
        assert!(QuadInt::new(1, 1, -105).is_ok());
    }

    #[test]
    fn modquad_matches_exact() {
        let g = q(-3, -1, -105);
        let exact = qpow(&g, 7);
        for m in [5u64, 7, 11, 101] {
            let dm = (-105i64).rem_euclid(m as i64) as u64;
            let gm = ModQuad { a: (-3i64).rem_euclid(m as i64) as u64, b: (m - 1) % m };
            let got = gm.pow(7, dm, m);
            let mb = BigInt::from(m);
            use num_integer::Integer;
            assert_eq!(BigInt::from(got.a), exact.a().mod_floor(&mb));
            assert_eq!(BigInt::from(got.b), exact.b().mod_floor(&mb));
        }
    }

    fn ring() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![-1i64, 2, -105, 3, -5, 7])
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 256, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

        #[test]
        fn norm_is_multiplicative(d in ring(), a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000, e in -1000i64..1000) {
            let x = q(a, b, d);
            let y = q(c, e, d);
            prop_assert_eq!(qnorm(&qmul(&x, &y).unwrap()), qnorm(&x) * qnorm(&y));
        }

        #[test]
        fn conj_is_homomorphism(d in ring(), a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000, e in -1000i64..1000) {
            let x = q(a, b, d);
            let y = q(c, e, d);
            prop_assert_eq!(qconj(&qmul(&x, &y).unwrap()), qmul(&qconj(&x), &qconj(&y)).unwrap());
            prop_assert_eq!(qconj(&qconj(&x)), x.clone());
            let xx = qmul(&x, &qconj(&x)).unwrap();
            prop_assert!(xx.b().is_zero());
            prop_assert_eq!(xx.a(), &qnorm(&x));
        }

        #[test]
        fn pow_matches_repeated_product(d in ring(), a in -50i64..50, b in -50i64..50, n in 0u64..=12) {
            let x = q(a, b, d);
            let mut acc = QuadInt::one(d).unwrap();
            for _ in 0..n {
                acc = qmul(&acc, &x).unwrap();
            }
            prop_assert_eq!(qpow(&x, n), acc);
        }
    }
}

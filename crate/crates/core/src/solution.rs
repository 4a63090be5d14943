//! Solution tuples and the descent data that certifies them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::numutil::{divisors, perfect_power};
use crate::qring::{qpow, QuadInt};

/// A solution `(x, y)` of `(x+r)^2 + ... + (x+dr)^2 = y^n`.
///
/// Field order gives the canonical sort `(d, r, n, x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution {
    pub d: u32,
    pub r: u64,
    pub n: u32,
    pub x: BigInt,
    pub y: BigInt,
}

/// `(x+r)^2 + (x+2r)^2 + ... + (x+dr)^2`.
pub fn sum_of_squares(d: u32, r: u64, x: &BigInt) -> BigInt {
    let r = BigInt::from(r);
    (1..=d)
        .map(|k| {
            let t = x + &r * k;
            &t * &t
        })
        .sum()
}

/// `d(d+1)(2d+1)/6`, the coefficient of `r^2` after expanding the sum.
pub fn square_pyramidal(d: u32) -> u64 {
    let d = d as u64;
    d * (d + 1) * (2 * d + 1) / 6
}

impl Solution {
    pub fn new(d: u32, r: u64, x: impl Into<BigInt>, y: impl Into<BigInt>, n: u32) -> Self {
        Solution { d, r, n, x: x.into(), y: y.into() }
    }

    pub fn holds(&self) -> bool {
        sum_of_squares(self.d, self.r, &self.x) == num_traits::pow(self.y.clone(), self.n as usize)
    }

    pub fn is_primitive(&self) -> bool {
        self.x.gcd(&self.y).gcd(&BigInt::from(self.r)).is_one()
    }

    /// `x -> -x - (d+1)r` fixes the left-hand side.
    pub fn reflect(&self) -> Solution {
        let shift = BigInt::from(self.r) * (self.d + 1);
        Solution { x: -&self.x - shift, ..self.clone() }
    }

    /// Same row with `|y|`, the convention for even exponents.
    pub fn with_abs_y(&self) -> Solution {
        Solution { y: self.y.abs(), ..self.clone() }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.n)
    }
}

/// Which unit or divisor branch a descent witness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitCase {
    /// `(x+2r) + i(x+r) = s * alpha^4`, `s = +-1`.
    RealUnit(i8),
    /// `(x+2r) + i(x+r) = s * i * alpha^4`, `s = +-1`.
    ImaginaryUnit(i8),
    /// `alpha^n + i conj(alpha)^n = (1+i) r` with `u + v = t` (`n = 1 mod 4`).
    SumDivides,
    /// Same, with `u - v = t` (`n = 3 mod 4`).
    DifferenceDivides,
    /// `X + r sqrt(-105) = gamma^n / 6^((n-1)/2)`.
    SixDescent,
}

/// Coordinates of the descent element together with the divisor it used.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DescentWitness {
    /// Ring tag `D` of `Z[sqrt D]`.
    pub ring: i64,
    pub u: BigInt,
    pub v: BigInt,
    /// `t` for `d = 2` odd exponents, `v` for `d = 6`, and `r` for `n = 4`.
    pub divisor: BigInt,
    pub unit_case: UnitCase,
    /// `X = 6x + 21r`, only for `d = 6`.
    pub big_x: Option<BigInt>,
}

impl DescentWitness {
    /// Rebuild `(x, y)` for the given `r` and `n` from the witness alone.
    pub fn reconstruct(&self, r: u64, n: u32) -> Option<(BigInt, BigInt)> {
        let rb = BigInt::from(r);
        let alpha = QuadInt::new(self.u.clone(), self.v.clone(), self.ring).ok()?;
        let (a, b) = qpow(&alpha, n as u64).into_parts();
        let norm = &self.u * &self.u - BigInt::from(self.ring) * &self.v * &self.v;
        match self.unit_case {
            UnitCase::RealUnit(s) | UnitCase::ImaginaryUnit(s) => {
                let s = BigInt::from(s);
                let (p, _q) = match self.unit_case {
                    UnitCase::RealUnit(_) => (&a * &s, &b * &s),
                    _ => (-&b * &s, &a * &s),
                };
                Some((p - &rb * 2u32, norm))
            }
            UnitCase::SumDivides | UnitCase::DifferenceDivides => {
                let twice = a - b - &rb * 3u32;
                if twice.is_odd() {
                    return None;
                }
                Some((twice / 2, norm))
            }
            UnitCase::SixDescent => {
                let scale = num_traits::pow(BigInt::from(6), ((n - 1) / 2) as usize);
                let (big_x, rem) = a.div_rem(&scale);
                if !rem.is_zero() {
                    return None;
                }
                let (x, rem) = (big_x - &rb * 21u32).div_rem(&BigInt::from(6));
                let (y, rem_y) = norm.div_rem(&BigInt::from(6));
                if !rem.is_zero() || !rem_y.is_zero() {
                    return None;
                }
                Some((x, y))
            }
        }
    }
}

/// A verified primitive solution with the witness that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certified {
    pub solution: Solution,
    pub witness: Option<DescentWitness>,
}

/// Sort by solution and keep the first witness of each.
pub fn dedup_certified(mut found: Vec<Certified>) -> Vec<Certified> {
    found.sort_by(|a, b| a.solution.cmp(&b.solution));
    found.dedup_by(|a, b| a.solution == b.solution);
    found
}

/// Solutions with `|y| = 1`, which exist for every exponent. Solved directly
/// from the quadratic `d x^2 + d(d+1) r x + c_d r^2 = 1`.
pub fn unit_solutions(d: u32, r: u64, n: u32) -> Vec<Solution> {
    let (db, rb) = (BigInt::from(d), BigInt::from(r));
    let lin = &db * (d + 1) * &rb;
    let disc = &lin * &lin - BigInt::from(4) * &db * (BigInt::from(square_pyramidal(d)) * &rb * &rb - 1u32);
    if disc.is_negative() {
        return Vec::new();
    }
    let root = disc.sqrt();
    if &root * &root != disc {
        return Vec::new();
    }
    let mut out = Vec::new();
    for num in [-&lin + &root, -&lin - &root] {
        let (x, rem) = num.div_rem(&(&db * 2));
        if !rem.is_zero() {
            continue;
        }
        for y in [BigInt::one(), -BigInt::one()] {
            if n % 2 == 1 && y.is_negative() {
                continue;
            }
            let s = Solution::new(d, r, x.clone(), y, n);
            if s.holds() && s.is_primitive() && !out.contains(&s) {
                out.push(s);
            }
            if n % 2 == 0 {
                break;
            }
        }
    }
    out.sort();
    out
}

/// Solutions with composite exponent read off a perfect-power `y`: if
/// `y = b^e` then `(x, b^(e/k), n k)` solves the equation for each `k | e`,
/// `k > 1`.
pub fn perfect_power_lifts(sol: &Solution) -> Vec<Solution> {
    let Ok((base, e)) = perfect_power(&sol.y) else { return Vec::new() };
    if e < 2 {
        return Vec::new();
    }
    divisors(e as i64, false)
        .unwrap_or_default()
        .into_iter()
        .filter(|&k| k > 1)
        .map(|k| {
            let y = num_traits::pow(base.clone(), (e as i64 / k) as usize);
            Solution::new(sol.d, sol.r, sol.x.clone(), y, sol.n * k as u32)
        })
        .filter(Solution::holds)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows_hold() {
        assert!(Solution::new(2, 1, 118, 13, 4).holds());
        assert!(Solution::new(6, 23, -22, 31, 3).holds());
        assert!(Solution::new(6, 2933, 865, 19, 7).holds());
        assert!(!Solution::new(6, 2933, 865, 20, 7).holds());
    }

    #[test]
    fn reflection() {
        let s = Solution::new(2, 1, 118, 13, 4);
        assert_eq!(s.reflect().x, BigInt::from(-121));
        let s = Solution::new(6, 13, -20, 19, 3);
        assert_eq!(s.reflect().x, BigInt::from(-71));
        assert_eq!(s.reflect().reflect(), s);
    }

    #[test]
    fn pyramidal() {
        assert_eq!(square_pyramidal(2), 5);
        assert_eq!(square_pyramidal(6), 91);
    }

    #[test]
    fn lifts() {
        let got = perfect_power_lifts(&Solution::new(2, 1457, 8839, 125, 4));
        assert_eq!(got, vec![Solution::new(2, 1457, 8839, 5, 12)]);
        assert!(perfect_power_lifts(&Solution::new(6, 13, -20, 19, 3)).is_empty());
        assert!(perfect_power_lifts(&Solution::new(2, 1, -1, 1, 3)).is_empty());
    }

    #[test]
    fn unit_solutions_d2() {
        let got = unit_solutions(2, 1, 5);
        assert_eq!(got, vec![Solution::new(2, 1, -2, 1, 5), Solution::new(2, 1, -1, 1, 5)]);
        assert!(unit_solutions(2, 3, 5).is_empty());
        assert!(unit_solutions(6, 1, 3).is_empty());
    }
}

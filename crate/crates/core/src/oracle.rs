//! Brute-force enumeration, independent of every descent.
//!
//! For fixed `y` the equation is a quadratic in `x`:
//! `d x^2 + d(d+1) r x + c_d r^2 - y^n = 0`, so `x` is rational exactly when
//! the discriminant is a perfect square.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::numutil::pow_mod;
use crate::solution::{square_pyramidal, sum_of_squares, Solution};

/// Moduli for the square test on the discriminant.
const SQUARE_MODULI: [u64; 6] = [64, 63, 65, 11, 17, 19];

fn square_table(m: u64) -> Vec<bool> {
    let mut t = vec![false; m as usize];
    for k in 0..m {
        t[(k * k % m) as usize] = true;
    }
    t
}

struct Setup {
    d: BigInt,
    lin: BigInt,
    /// `d^2(d+1)^2 r^2 - 4 d c_d r^2`
    constant: BigInt,
    tables: Vec<(u64, Vec<bool>, u64)>,
}

impl Setup {
    fn new(d: u32, r: u64) -> Self {
        let db = BigInt::from(d);
        let rb = BigInt::from(r);
        let lin = &db * (d + 1) * &rb;
        let constant = &lin * &lin - BigInt::from(4u32) * &db * square_pyramidal(d) * &rb * &rb;
        let tables = SQUARE_MODULI
            .iter()
            .map(|&m| {
                let c = constant.mod_floor(&BigInt::from(m)).to_u64().unwrap_or(0);
                (m, square_table(m), c)
            })
            .collect();
        Setup { d: db, lin, constant, tables }
    }

    /// Discriminant is `constant + 4 d y^n`.
    fn may_be_square(&self, d: u64, y: u64, n: u32) -> bool {
        self.tables.iter().all(|(m, table, c)| {
            let v = (c + 4 * d % m * pow_mod(y % m, n as u64, *m)) % m;
            table[v as usize]
        })
    }

    fn solutions(&self, d: u32, r: u64, y: u64, n: u32) -> Vec<Solution> {
        if !self.may_be_square(d as u64, y, n) {
            return Vec::new();
        }
        let yb = BigInt::from(y);
        let disc = &self.constant + BigInt::from(4u32) * &self.d * num_traits::pow(yb.clone(), n as usize);
        if disc.is_negative() {
            return Vec::new();
        }
        let root = disc.sqrt();
        if &root * &root != disc {
            return Vec::new();
        }
        let den = &self.d * 2u32;
        let mut out = Vec::new();
        for num in [-&self.lin + &root, -&self.lin - &root] {
            let (x, rem) = num.div_rem(&den);
            if !rem.is_zero() {
                continue;
            }
            let s = Solution::new(d, r, x, yb.clone(), n);
            if s.is_primitive() && !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }
}

/// Every primitive solution with `n` in `n_set` and `1 <= y <= y_max`.
///
/// `y` is taken positive; for even `n` that is the `|y|` representative.
pub fn oracle_enumerate(d: u32, r: u64, n_set: &BTreeSet<u32>, y_max: u64) -> Vec<Solution> {
    let setup = Setup::new(d, r);
    let mut out: Vec<Solution> = n_set
        .iter()
        .flat_map(|&n| {
            let setup = &setup;
            (1..=y_max).into_par_iter().flat_map_iter(move |y| setup.solutions(d, r, y, n)).collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    out
}

/// Scan `x` directly and keep primitive solutions whose left-hand side is an
/// exact `n`-th power. Negative `y` is reported for odd exponents only.
pub fn oracle_scan_x(d: u32, r: u64, n_set: &BTreeSet<u32>, xs: RangeInclusive<i64>) -> Vec<Solution> {
    let mut out: Vec<Solution> = xs
        .into_par_iter()
        .flat_map_iter(|x| {
            let xb = BigInt::from(x);
            let lhs = sum_of_squares(d, r, &xb);
            n_set
                .iter()
                .filter_map(|&n| {
                    let y = lhs.nth_root(n);
                    let s = Solution::new(d, r, xb.clone(), y, n);
                    (s.holds() && s.is_primitive()).then_some(s)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ns: &[u32]) -> BTreeSet<u32> {
        ns.iter().copied().collect()
    }

    fn sols(d: u32, r: u64, rows: &[(i64, i64, u32)]) -> Vec<Solution> {
        let mut v: Vec<Solution> = rows.iter().map(|&(x, y, n)| Solution::new(d, r, x, y, n)).collect();
        v.sort();
        v
    }

    #[test]
    fn examples() {
        assert_eq!(
            oracle_enumerate(2, 1, &set(&[4]), 20),
            sols(2, 1, &[(118, 13, 4), (-121, 13, 4), (-1, 1, 4), (-2, 1, 4)])
        );
        assert_eq!(oracle_enumerate(6, 23, &set(&[3]), 50), sols(6, 23, &[(-22, 31, 3), (-139, 31, 3)]));
        assert_eq!(oracle_enumerate(2, 1, &set(&[5]), 1), sols(2, 1, &[(-1, 1, 5), (-2, 1, 5)]));
        assert_eq!(oracle_enumerate(2, 3, &set(&[2, 3, 4, 5, 6, 7]), 100), sols(2, 3, &[(35, 5, 5), (-44, 5, 5)]));
        assert!(oracle_enumerate(8, 1, &set(&[2, 3, 4, 5]), 1000).is_empty());
        assert_eq!(oracle_enumerate(6, 13, &set(&[2, 3]), 50), sols(6, 13, &[(-20, 19, 3), (-71, 19, 3)]));
    }

    #[test]
    fn imprimitive_rows_dropped() {
        // every row for even r would share a factor 2
        for s in oracle_enumerate(2, 2, &set(&[2, 3, 4]), 500) {
            assert!(s.is_primitive());
        }
    }

    #[test]
    fn scan_x_agrees_with_y_enumeration() {
        let ns = set(&[2, 3, 4, 5]);
        for (d, r) in [(2u32, 1u64), (2, 3), (6, 13), (2, 7)] {
            let by_x = oracle_scan_x(d, r, &ns, -2000..=2000);
            let by_y: Vec<Solution> = oracle_enumerate(d, r, &ns, 3000)
                .into_iter()
                .filter(|s| (-2000..=2000).contains(&s.x.to_i64().unwrap()))
                .collect();
            let by_x_abs: Vec<Solution> = {
                let mut v: Vec<Solution> = by_x.iter().map(Solution::with_abs_y).collect();
                v.sort();
                v.dedup();
                v
            };
            assert_eq!(by_x_abs, by_y, "d={d} r={r}");
        }
    }

    #[test]
    fn reflection_closed() {
        for r in 1..=30u64 {
            let found = oracle_enumerate(2, r, &set(&[2, 3, 4, 5]), 400);
            for s in &found {
                assert!(found.contains(&s.reflect()), "{s} r={r}");
            }
        }
    }
}

//! Integer roots of the one-variable descent polynomials.
//!
//! Every candidate exponent and divisor yields a polynomial whose integer
//! roots are wanted, and almost all of them have none. A cheap test modulo
//! small primes rejects most before the polynomial is even built. Survivors
//! of low degree go through [`integer_roots`]; high-degree survivors are
//! located by lifting the allowed residues with the Chinese remainder theorem
//! until the modulus exceeds the root bound, then checked exactly.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::numutil::{integer_roots, pow_mod, root_bound, small_primes, IntPoly};

/// Degrees up to this go through monotone-piece bisection.
pub const EXACT_DEGREE_LIMIT: usize = 16;

/// Number of primes used by the rejection filter.
const FILTER_PRIMES: usize = 12;

const MAX_CANDIDATES: usize = 1 << 18;

fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| small_primes(60))
}

fn allowed_residues(ell: u64, residue_ok: &impl Fn(u64, u64) -> bool) -> Vec<u64> {
    (0..ell).filter(|&z| residue_ok(z, ell)).collect()
}

/// Integer roots of the polynomial produced by `build`, whose reduction mod
/// a prime `ell` vanishes at `z` exactly when `residue_ok(z, ell)`.
pub(crate) fn find_integer_roots<F, B>(residue_ok: F, build: B, degree: usize) -> Vec<BigInt>
where
    F: Fn(u64, u64) -> bool,
    B: FnOnce() -> IntPoly,
{
    let mut allowed = Vec::new();
    for &ell in &primes()[..FILTER_PRIMES] {
        let res = allowed_residues(ell, &residue_ok);
        if res.is_empty() {
            return Vec::new();
        }
        allowed.push((ell, res));
    }
    let poly = build();
    if poly.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    if degree <= EXACT_DEGREE_LIMIT {
        return integer_roots(&poly).unwrap_or_default();
    }
    lift_and_check(&poly, allowed, &residue_ok)
}

fn lift_and_check(
    poly: &IntPoly,
    mut allowed: Vec<(u64, Vec<u64>)>,
    residue_ok: &impl Fn(u64, u64) -> bool,
) -> Vec<BigInt> {
    let bound = match root_bound(poly) {
        Ok(b) => b,
        Err(_) => return Vec::new(),
    };
    let width = &bound * 2 + 1;
    let mut modulus = BigInt::from(1);
    let mut residues = vec![BigInt::zero()];
    let mut next_prime = FILTER_PRIMES;
    let mut idx = 0;
    while modulus <= width {
        if idx == allowed.len() {
            let Some(&ell) = primes().get(next_prime) else { break };
            next_prime += 1;
            let res = allowed_residues(ell, residue_ok);
            if res.is_empty() {
                return Vec::new();
            }
            allowed.push((ell, res));
        }
        let (ell, ref res) = allowed[idx];
        idx += 1;
        if residues.len() * res.len() > MAX_CANDIDATES {
            return integer_roots(poly).unwrap_or_default();
        }
        let ell_b = BigInt::from(ell);
        let l_mod = modulus.mod_floor(&ell_b).to_u64().unwrap_or(0);
        let l_inv = pow_mod(l_mod, ell - 2, ell);
        let mut lifted = Vec::with_capacity(residues.len() * res.len());
        for s in &residues {
            let s_mod = s.mod_floor(&ell_b).to_u64().unwrap_or(0);
            for &a in res {
                let k = ((a + ell - s_mod) % ell) as u128 * l_inv as u128 % ell as u128;
                lifted.push(s + &modulus * BigInt::from(k as u64));
            }
        }
        residues = lifted;
        modulus *= ell_b;
    }
    let lo = -&bound;
    let mut roots = Vec::new();
    for s in residues {
        // smallest c >= lo with c = s mod modulus
        let mut c = &lo + (&s - &lo).mod_floor(&modulus);
        while c <= bound {
            if poly.eval(&c).is_zero() {
                roots.push(c.clone());
            }
            c += &modulus;
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residue_test(p: &IntPoly) -> impl Fn(u64, u64) -> bool + '_ {
        move |z, ell| p.eval_mod(z, ell) == 0
    }

    #[test]
    fn low_degree_agrees_with_integer_roots() {
        let roots: Vec<BigInt> = [-17i64, 4, 4, 90].iter().map(|&r| BigInt::from(r)).collect();
        let p = IntPoly::from_roots(&roots).mul(&IntPoly::from_i64(&[3, 0, 1]));
        let got = find_integer_roots(residue_test(&p), || p.clone(), 6);
        assert_eq!(got, vec![BigInt::from(-17), BigInt::from(4), BigInt::from(90)]);
    }

    #[test]
    fn crt_path_finds_roots_of_high_degree() {
        // (u - 1234)(u + 77)(u^2 + 5)^9 has degree 20
        let base = IntPoly::from_roots(&[BigInt::from(1234), BigInt::from(-77)]);
        let mut p = base;
        for _ in 0..9 {
            p = p.mul(&IntPoly::from_i64(&[5, 0, 1]));
        }
        let got = find_integer_roots(residue_test(&p), || p.clone(), 20);
        assert_eq!(got, vec![BigInt::from(-77), BigInt::from(1234)]);
        assert_eq!(lift_and_check(&p, Vec::new(), &residue_test(&p)), got);
    }

    #[test]
    fn filter_rejects_without_building() {
        // u^2 - 3 has no root mod 5
        let got = find_integer_roots(|z, ell| (z * z + ell * 3 - 3) % ell == 0, || panic!("built"), 2);
        assert!(got.is_empty());
    }
}

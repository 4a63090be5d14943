//! Sieve, exponent bound and solver chained together for one `(d, r)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::expbound::{exponent_set_d2, exponent_set_d6};
use crate::numutil::{factorize, is_prime, perfect_power};
use crate::sieve::{classify_for_r, Reason, Verdict};
use crate::solution::{unit_solutions, Certified, Solution};
use crate::solver_d2::{solve_n2, solve_n4, solve_odd_prime, SolveOptions};
use crate::solver_d6::solve_odd_prime_d6;

/// Which exponents to report on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExponentSelector {
    One(u32),
    /// Every prime `n`, including 2.
    Primes,
    All,
}

impl FromStr for ExponentSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(ExponentSelector::All),
            "primes" => Ok(ExponentSelector::Primes),
            _ => match s.parse::<u32>() {
                Ok(n) if n >= 2 => Ok(ExponentSelector::One(n)),
                _ => Err(Error::InvalidArgument(format!("exponent selector {s:?}: expected all, primes or n >= 2"))),
            },
        }
    }
}

impl fmt::Display for ExponentSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentSelector::One(n) => write!(f, "{n}"),
            ExponentSelector::Primes => write!(f, "primes"),
            ExponentSelector::All => write!(f, "all"),
        }
    }
}

/// The exponents a report entry speaks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Exponent(u32),
    /// Every odd prime outside the candidate set.
    OtherPrimes,
    /// Every exponent not listed in another entry.
    OtherExponents,
    /// Every selected exponent.
    Every,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Exponent(n) => write!(f, "n={n}"),
            Scope::OtherPrimes => write!(f, "other primes n"),
            Scope::OtherExponents => write!(f, "other n"),
            Scope::Every => write!(f, "all n"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub scope: Scope,
    pub verdict: Verdict,
    /// Solutions of a `Finite` verdict with their witnesses where known.
    pub certified: Vec<Certified>,
    /// For the catch-all scopes: `x` values of the `y = 1` rows, which
    /// solve the equation at every exponent.
    pub unit_x: Vec<BigInt>,
}

impl Entry {
    fn plain(scope: Scope, verdict: Verdict) -> Self {
        Entry { scope, verdict, certified: Vec::new(), unit_x: Vec::new() }
    }

    fn finite(scope: Scope, mut certified: Vec<Certified>) -> Self {
        certified.sort_by(|a, b| a.solution.cmp(&b.solution));
        certified.dedup_by(|a, b| a.solution == b.solution);
        let sols = certified.iter().map(|c| c.solution.clone()).collect();
        Entry { scope, verdict: Verdict::Finite(sols), certified, unit_x: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub d: u32,
    pub r: u64,
    pub selector: ExponentSelector,
    pub entries: Vec<Entry>,
}

impl SolveReport {
    /// Solutions at explicitly listed exponents, canonical order.
    pub fn certified(&self) -> Vec<Certified> {
        let mut all: Vec<Certified> = self
            .entries
            .iter()
            .filter(|e| matches!(e.scope, Scope::Exponent(_)))
            .flat_map(|e| e.certified.iter().cloned())
            .collect();
        all.sort_by(|a, b| a.solution.cmp(&b.solution));
        all.dedup_by(|a, b| a.solution == b.solution);
        all
    }

    pub fn solutions(&self) -> Vec<Solution> {
        self.certified().into_iter().map(|c| c.solution).collect()
    }

    /// True when the whole request fell outside what this tool handles.
    pub fn is_unsupported(&self) -> bool {
        self.entries.iter().any(|e| matches!(e.verdict, Verdict::Unsupported { .. } | Verdict::Deferred))
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d={} r={} n={}", self.d, self.r, self.selector)?;
        for e in &self.entries {
            if e.unit_x.is_empty() {
                writeln!(f, "  {}: {}", e.scope, e.verdict)?;
            } else {
                let xs: Vec<String> = e.unit_x.iter().map(|x| x.to_string()).collect();
                writeln!(f, "  {}: only y = 1, x in {{{}}}", e.scope, xs.join(", "))?;
            }
        }
        Ok(())
    }
}

/// An elimination that holds for every exponent `n >= from`, if any.
fn uniform_elimination(d: u32, r: u64, from: u32) -> Result<Option<Reason>> {
    let reason = match classify_for_r(d, r, from)? {
        Verdict::Eliminated(reason) => reason,
        _ => return Ok(None),
    };
    // the obstruction survives only for n dividing a fixed positive integer
    let holds_beyond = match reason {
        Reason::TwoAdicValuation { j, p_divides_r } | Reason::ThreeAdicValuation { j, p_divides_r } => {
            j - u32::from(!p_divides_r) < from
        }
        Reason::PrimeFiveModTwelve { ord, .. } => ord < from,
        _ => false,
    };
    Ok(holds_beyond.then_some(reason))
}

fn is_valid_d(d: u32) -> Option<Verdict> {
    if !(2..=10).contains(&d) {
        return Some(Verdict::Unsupported { d });
    }
    (d == 3).then_some(Verdict::Deferred)
}

/// Run the full pipeline for one `(d, r)` and exponent selection.
pub fn solve(d: u32, r: u64, selector: ExponentSelector, opts: &SolveOptions) -> Result<SolveReport> {
    if r == 0 {
        return Err(Error::NonPositive(r.to_string()));
    }
    let report = |entries| Ok(SolveReport { d, r, selector, entries });
    if let Some(v) = is_valid_d(d) {
        return report(vec![Entry::plain(Scope::Every, v)]);
    }
    if let ExponentSelector::One(n) = selector {
        return report(vec![solve_single(d, r, n, opts)?]);
    }
    if let Some(reason) = uniform_elimination(d, r, 2)? {
        return report(vec![Entry::plain(Scope::Every, Verdict::Eliminated(reason))]);
    }
    let all = selector == ExponentSelector::All;
    let scope = if all { Scope::OtherExponents } else { Scope::OtherPrimes };
    let mut entries = Vec::new();
    if d != 2 && d != 6 {
        // no descent here: list the few small exponents that survive, then
        // the elimination covering the rest (ord_p(d) <= 3, so this stops early)
        let mut n = 2;
        let reason = loop {
            if let Some(reason) = uniform_elimination(d, r, n)? {
                break reason;
            }
            if all || is_prime(n as u64) {
                entries.push(Entry::plain(Scope::Exponent(n), classify_for_r(d, r, n)?));
            }
            n += 1;
        };
        entries.push(Entry::plain(scope, Verdict::Eliminated(reason)));
        return report(entries);
    }
    if d == 6 && r.gcd(&6) != 1 {
        let p = if r % 2 == 0 { 2 } else { 3 };
        return report(vec![Entry::plain(Scope::Every, Verdict::NoSolutions(Reason::ImprimitiveR { p }))]);
    }
    let candidates = if d == 2 { exponent_set_d2(r)? } else { exponent_set_d6(r)? };
    entries.push(solve_single(d, r, 2, opts)?);
    if all && d == 2 {
        entries.push(solve_single(d, r, 4, opts)?);
    }
    let mut odd = Vec::new();
    for &n in &candidates.primes {
        let e = solve_single(d, r, n as u32, opts)?;
        odd.extend(e.certified.iter().cloned());
        entries.push(e);
    }
    if all {
        let mut seeds: Vec<Certified> = odd;
        if d == 2 {
            seeds.extend(entries[1].certified.iter().cloned());
        }
        let mut lifted: std::collections::BTreeMap<u32, Vec<Certified>> = Default::default();
        for c in &seeds {
            for s in crate::solution::perfect_power_lifts(&c.solution) {
                lifted.entry(s.n).or_default().push(Certified { solution: s, witness: None });
            }
        }
        // lifts of the |y| = 1 rows exist at every n and are covered below
        for (n, found) in lifted {
            if entries.iter().all(|e| e.scope != Scope::Exponent(n)) {
                entries.push(Entry::finite(Scope::Exponent(n), found));
            }
        }
    }
    let units = unit_solutions(d, r, 3);
    if units.is_empty() {
        entries.push(Entry::plain(scope, Verdict::NoSolutions(Reason::ExponentOutsideBound)));
    } else {
        // y = 1 rows exist for every exponent, so they are listed by x only
        let mut e = Entry::plain(scope, Verdict::Finite(Vec::new()));
        e.unit_x = units.into_iter().map(|s| s.x).collect();
        entries.push(e);
    }
    report(entries)
}

/// The largest odd prime dividing `n`, if any.
fn odd_prime_factor(n: u32) -> Option<u32> {
    factorize(n as i64).ok()?.primes().filter(|&p| p != 2).max().map(|p| p as u32)
}

fn solve_single(d: u32, r: u64, n: u32, opts: &SolveOptions) -> Result<Entry> {
    let scope = Scope::Exponent(n);
    if let Some(v) = is_valid_d(d) {
        return Ok(Entry::plain(scope, v));
    }
    let verdict = classify_for_r(d, r, n)?;
    if verdict != Verdict::Open {
        return Ok(Entry::plain(scope, verdict));
    }
    match d {
        2 => {
            if r % 2 == 0 {
                return Ok(Entry::plain(scope, Verdict::NoSolutions(Reason::ImprimitiveR { p: 2 })));
            }
            if n == 2 {
                return Ok(Entry::plain(scope, solve_n2(r)?));
            }
            if n == 4 {
                return Ok(Entry::finite(scope, solve_n4(r, opts.thue_bound)));
            }
            if is_prime(n as u64) {
                if exponent_set_d2(r)?.contains(n as u64) {
                    return Ok(Entry::finite(scope, solve_odd_prime(r, n as u64)?));
                }
                return Ok(units_entry(d, r, n));
            }
        }
        6 => {
            if r.gcd(&6) != 1 {
                let p = if r % 2 == 0 { 2 } else { 3 };
                return Ok(Entry::plain(scope, Verdict::NoSolutions(Reason::ImprimitiveR { p })));
            }
            if is_prime(n as u64) {
                if exponent_set_d6(r)?.contains(n as u64) {
                    return Ok(Entry::finite(scope, solve_odd_prime_d6(r, n as u64)?));
                }
                return Ok(units_entry(d, r, n));
            }
        }
        _ => return Ok(Entry::plain(scope, Verdict::Open)),
    }
    // composite n: (x, y, n) gives (x, y^(n/p), p) for the prime p | n
    let base = odd_prime_factor(n).unwrap_or(4);
    let inner = solve_single(d, r, base, opts)?;
    let k = n / base;
    let found: Vec<Certified> = inner
        .certified
        .iter()
        .filter_map(|c| root_of(&c.solution, k, n))
        .map(|s| Certified { solution: s, witness: None })
        .collect();
    Ok(Entry::finite(scope, found))
}

/// `(x, y^(1/k), n)` when `y` is a perfect `k`-th power.
fn root_of(sol: &Solution, k: u32, n: u32) -> Option<Solution> {
    let y = if sol.y.magnitude() <= &1u32.into() {
        sol.y.clone()
    } else {
        let (base, e) = perfect_power(&sol.y).ok()?;
        if e % k != 0 {
            return None;
        }
        num_traits::pow(base, (e / k) as usize)
    };
    let s = Solution { y, n, ..sol.clone() };
    s.holds().then_some(s)
}

fn units_entry(d: u32, r: u64, n: u32) -> Entry {
    let units = unit_solutions(d, r, n);
    if units.is_empty() {
        return Entry::plain(Scope::Exponent(n), Verdict::NoSolutions(Reason::ExponentOutsideBound));
    }
    Entry::finite(Scope::Exponent(n), units.into_iter().map(|s| Certified { solution: s, witness: None }).collect())
}

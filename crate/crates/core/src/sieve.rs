//! Local obstructions: which `(d, n)` pairs can be discarded before any
//! descent is attempted.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::numutil::{factorize, valuation};
use crate::solution::Solution;
use crate::solver_d2::PellFamily;

/// Why a verdict rules solutions out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    /// `j = ord_2(d) >= 2` forces `n | j - 1`, or `n | j` when `2 | r`.
    TwoAdicValuation { j: u32, p_divides_r: bool },
    /// `j = ord_3(d) >= 2` forces `n | j - 1`, or `n | j` when `3 | r`.
    ThreeAdicValuation { j: u32, p_divides_r: bool },
    /// A prime `q = +-5 mod 12` divides `d` with `ord_q(d) != 0 mod n`.
    PrimeFiveModTwelve { q: u64, ord: u32 },
    /// `3(2x+7r)^2 + 35r^2 = 2y^2` needs 6 to be a square mod 7.
    SixNonSquareModSeven,
    /// `(2x+9r)^2 + 21r^2 = 2Y^2` needs 2 to be a square mod 3.
    TwoNonSquareModThree,
    /// `(2x+3r)^2 - 2y^2 = -r^2` needs every prime of `r` to be `+-1 mod 8`.
    PrimeNotSplitInZSqrt2 { q: u64 },
    /// `r` shares the prime `p` with every solution's `(x, y)`.
    ImprimitiveR { p: u64 },
    /// The exponent lies outside the candidate exponent set for this `r`.
    ExponentOutsideBound,
}

impl Reason {
    /// Stable machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Reason::TwoAdicValuation { .. } => "two-adic-valuation",
            Reason::ThreeAdicValuation { .. } => "three-adic-valuation",
            Reason::PrimeFiveModTwelve { .. } => "prime-5-mod-12",
            Reason::SixNonSquareModSeven => "d6-n2-mod7",
            Reason::TwoNonSquareModThree => "d8-n2-mod3",
            Reason::PrimeNotSplitInZSqrt2 { .. } => "d2-n2-residue-mod8",
            Reason::ImprimitiveR { .. } => "imprimitive-r",
            Reason::ExponentOutsideBound => "exponent-outside-bound",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Reason::TwoAdicValuation { j, p_divides_r } => write_valuation(f, 2, j, p_divides_r),
            Reason::ThreeAdicValuation { j, p_divides_r } => write_valuation(f, 3, j, p_divides_r),
            Reason::PrimeFiveModTwelve { q, ord } => {
                write!(f, "q={q} ≡ {} mod 12 divides d with ord_q(d) = {ord} ≢ 0 mod n", q % 12)
            }
            Reason::SixNonSquareModSeven => write!(f, "6 is not a square mod 7"),
            Reason::TwoNonSquareModThree => write!(f, "2 is not a square mod 3"),
            Reason::PrimeNotSplitInZSqrt2 { q } => write!(f, "prime {q} ≡ {} mod 8", q % 8),
            Reason::ImprimitiveR { p } => write!(f, "{p} | r makes every solution imprimitive"),
            Reason::ExponentOutsideBound => write!(f, "n is not in the candidate exponent set"),
        }
    }
}

fn write_valuation(f: &mut fmt::Formatter<'_>, p: u32, j: u32, p_divides_r: bool) -> fmt::Result {
    if p_divides_r {
        write!(f, "ord_{p}(d) = {j} and {p} | r force n | {j}")
    } else {
        write!(f, "ord_{p}(d) = {j} forces n | {}", j - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    Eliminated,
    NoSolutions,
    Family,
    Finite,
    Open,
    Unsupported,
    Deferred,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::Eliminated => "eliminated",
            VerdictKind::NoSolutions => "no-solutions",
            VerdictKind::Family => "family",
            VerdictKind::Finite => "finite",
            VerdictKind::Open => "open",
            VerdictKind::Unsupported => "unsupported",
            VerdictKind::Deferred => "deferred",
        }
    }
}

/// Outcome of classifying or solving one `(d, r, n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Eliminated(Reason),
    NoSolutions(Reason),
    Family(Box<PellFamily>),
    Finite(Vec<Solution>),
    /// Needs a descent.
    Open,
    Unsupported {
        d: u32,
    },
    /// `d = 3` is resolved elsewhere and not handled here.
    Deferred,
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Eliminated(_) => VerdictKind::Eliminated,
            Verdict::NoSolutions(_) => VerdictKind::NoSolutions,
            Verdict::Family(_) => VerdictKind::Family,
            Verdict::Finite(_) => VerdictKind::Finite,
            Verdict::Open => VerdictKind::Open,
            Verdict::Unsupported { .. } => VerdictKind::Unsupported,
            Verdict::Deferred => VerdictKind::Deferred,
        }
    }

    pub fn reason(&self) -> Option<Reason> {
        match self {
            Verdict::Eliminated(r) | Verdict::NoSolutions(r) => Some(*r),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Eliminated(r) => write!(f, "Eliminated [{}]: {r}", r.tag()),
            Verdict::NoSolutions(r) => write!(f, "NoSolutions [{}]: {r}", r.tag()),
            Verdict::Family(fam) => write!(f, "Family: {fam}"),
            Verdict::Finite(sols) => {
                write!(f, "Finite: ")?;
                if sols.is_empty() {
                    return write!(f, "none");
                }
                let parts: Vec<String> = sols.iter().map(|s| s.to_string()).collect();
                write!(f, "{}", parts.join(", "))
            }
            Verdict::Open => write!(f, "Open"),
            Verdict::Unsupported { d } => write!(f, "Unsupported: d={d} is outside 2..=10"),
            Verdict::Deferred => write!(f, "Deferred: d=3 is not handled by this tool"),
        }
    }
}

/// Classify `(d, n)` from local arguments alone, for `r` prime to 6.
///
/// Checks run in a fixed order: 2-adic valuation, 3-adic valuation, primes
/// `+-5 mod 12`, then the special quadratic cases.
pub fn classify(d: u32, n: u32) -> Result<Verdict> {
    classify_for_r(d, 1, n)
}

/// Like [`classify`], but with the valuation checks adjusted to `r`.
///
/// When `p | r` for `p` in {2, 3}, primitivity gives `p ∤ x` and the left side
/// has `p`-adic valuation exactly `ord_p(d)`, so the condition becomes
/// `n | ord_p(d)`. For example `d = 4, r = 2` has `(-3, 6, 2)`.
pub fn classify_for_r(d: u32, r: u64, n: u32) -> Result<Verdict> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("exponent n={n} must be at least 2")));
    }
    if r == 0 {
        return Err(Error::NonPositive(r.to_string()));
    }
    if !(2..=10).contains(&d) {
        return Ok(Verdict::Unsupported { d });
    }
    let db = BigInt::from(d);
    let j2 = valuation(&db, 2)?;
    let shared2 = r % 2 == 0;
    if j2 >= 2 && (j2 - u32::from(!shared2)) % n != 0 {
        return Ok(Verdict::Eliminated(Reason::TwoAdicValuation { j: j2, p_divides_r: shared2 }));
    }
    let j3 = valuation(&db, 3)?;
    let shared3 = r % 3 == 0;
    if j3 >= 2 && (j3 - u32::from(!shared3)) % n != 0 {
        return Ok(Verdict::Eliminated(Reason::ThreeAdicValuation { j: j3, p_divides_r: shared3 }));
    }
    // q | r changes nothing here: the valuation is ord_q(d) either way
    for (q, ord) in factorize(d as i64)?.factors {
        if (q % 12 == 5 || q % 12 == 7) && ord % n != 0 {
            return Ok(Verdict::Eliminated(Reason::PrimeFiveModTwelve { q, ord }));
        }
    }
    Ok(match (d, n) {
        (3, _) => Verdict::Deferred,
        // y^n = (y^(n/2))^2, so even exponents inherit the n = 2 obstruction
        (6, n) if n % 2 == 0 => Verdict::NoSolutions(Reason::SixNonSquareModSeven),
        (8, 2) => Verdict::NoSolutions(Reason::TwoNonSquareModThree),
        _ => Verdict::Open,
    })
}

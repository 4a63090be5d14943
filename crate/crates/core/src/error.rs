use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected a positive integer, got {0}")]
    NonPositive(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(String),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("square root of negative number {0}")]
    NegativeSqrt(String),
    #[error("perfect-power test needs |y| >= 2, got {0}")]
    TrivialPower(String),
    #[error("the zero polynomial has every integer as a root")]
    ZeroPolynomial,
    #[error("quadratic ring tags differ: {0} vs {1}")]
    RingMismatch(i64, i64),
    #[error("{0} is not a valid ring tag (must be squarefree and not 0 or 1)")]
    BadRingTag(i64),
    #[error("degenerate Lehmer parameters E={e}, Q={q}: {why}")]
    DegenerateLehmer { e: String, q: String, why: &'static str },
    #[error("prime {0} is not a norm from Z[sqrt 2] (needs q = +-1 mod 8)")]
    NoNormRepresentation(u64),
    #[error("d={0} is outside the supported range 2..=10")]
    UnsupportedD(u32),
    #[error("r={0} is not coprime to 6")]
    NotCoprimeToSix(u64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Perfect powers that are sums of squares of consecutive terms of an
//! arithmetic progression: `(x+r)^2 + (x+2r)^2 + ... + (x+dr)^2 = y^n`.

pub mod error;
pub mod expbound;
pub mod harness;
pub mod numutil;
pub mod oracle;
pub mod pipeline;
pub mod qring;
mod rootsearch;
pub mod sieve;
pub mod solution;
pub mod solver_d2;
pub mod solver_d6;

pub use error::{Error, Result};
pub use sieve::{classify, classify_for_r, Reason, Verdict, VerdictKind};
pub use solution::{Certified, DescentWitness, Solution, UnitCase};

//! Sweeps over `r`, table formats, and verification against the bundled
//! reference tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::pipeline::{solve, ExponentSelector};
use crate::sieve::Verdict;
use crate::solution::{Certified, DescentWitness, Solution};
use crate::solver_d2::{solve_n4_range, SolveOptions};

pub const CSV_HEADER: &str = "d,r,x,y,n";

const AP2_N4: &str = include_str!("../data/ap2_n4.csv");
const AP6_PRIME: &str = include_str!("../data/ap6_prime.csv");

/// Rows plus the `#` comment lines that preceded the header.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    /// Comment text after the `#`.
    pub comments: Vec<String>,
    pub rows: Vec<Solution>,
}

#[derive(Deserialize)]
struct CsvRow {
    d: u32,
    r: u64,
    x: String,
    y: String,
    n: u32,
}

fn parse_int(s: &str, line: usize, field: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| Error::Parse { line, msg: format!("{field}: {s:?} is not an integer") })
}

impl Table {
    pub fn parse_csv(text: &str) -> Result<Table> {
        let mut comments = Vec::new();
        let mut skipped = 0;
        for line in text.lines() {
            match line.strip_prefix('#') {
                Some(c) => comments.push(c.to_string()),
                None => break,
            }
            skipped += line.len() + 1;
        }
        let body = &text[skipped.min(text.len())..];
        let header_line = comments.len() + 1;
        match body.lines().next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            Some(h) => {
                return Err(Error::Parse {
                    line: header_line,
                    msg: format!("expected header {CSV_HEADER:?}, got {h:?}"),
                })
            }
            None => return Err(Error::Parse { line: header_line, msg: "missing header".into() }),
        }
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(body.as_bytes());
        let mut rows = Vec::new();
        for rec in reader.deserialize::<CsvRow>() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0) + comments.len();
                Error::Parse { line, msg: e.to_string() }
            })?;
            let line = comments.len() + 1 + rows.len() + 1;
            let x = parse_int(&rec.x, line, "x")?;
            let y = parse_int(&rec.y, line, "y")?;
            if rec.n < 2 || rec.r == 0 {
                return Err(Error::Parse { line, msg: "need r >= 1 and n >= 2".into() });
            }
            rows.push(Solution::new(rec.d, rec.r, x, y, rec.n));
        }
        Ok(Table { comments, rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push('#');
            out.push_str(c);
            out.push('\n');
        }
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
        for s in &self.rows {
            w.write_record([s.d.to_string(), s.r.to_string(), s.x.to_string(), s.y.to_string(), s.n.to_string()])
                .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii"));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceLabel {
    /// `d = 2`, `n = 4`, `1 <= r <= 10^4`.
    Ap2N4,
    /// `d = 6`, odd prime `n`, `1 <= r <= 10^4`.
    Ap6Prime,
}

impl ReferenceLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReferenceLabel::Ap2N4 => "AP2-n4",
            ReferenceLabel::Ap6Prime => "AP6-prime",
        }
    }

    pub fn d(&self) -> u32 {
        match self {
            ReferenceLabel::Ap2N4 => 2,
            ReferenceLabel::Ap6Prime => 6,
        }
    }

    pub fn selector(&self) -> ExponentSelector {
        match self {
            ReferenceLabel::Ap2N4 => ExponentSelector::One(4),
            ReferenceLabel::Ap6Prime => ExponentSelector::Primes,
        }
    }

    fn text(&self) -> &'static str {
        match self {
            ReferenceLabel::Ap2N4 => AP2_N4,
            ReferenceLabel::Ap6Prime => AP6_PRIME,
        }
    }
}

impl FromStr for ReferenceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ap2-n4" => Ok(ReferenceLabel::Ap2N4),
            "ap6-prime" => Ok(ReferenceLabel::Ap6Prime),
            _ => Err(Error::InvalidArgument(format!("unknown reference table {s:?}"))),
        }
    }
}

/// Published solution rows for one sweep.
#[derive(Debug, Clone)]
pub struct ReferenceTable {
    pub label: Option<ReferenceLabel>,
    pub table: Table,
    /// Rows that fail the equation or primitivity. They are kept, so a
    /// corrupted row shows up in the diff.
    pub warnings: Vec<String>,
}

impl ReferenceTable {
    pub fn bundled(label: ReferenceLabel) -> ReferenceTable {
        ReferenceTable::parse(label.text(), Some(label)).expect("bundled table parses")
    }

    pub fn parse(text: &str, label: Option<ReferenceLabel>) -> Result<ReferenceTable> {
        let table = Table::parse_csv(text)?;
        let first_row_line = table.comments.len() + 2;
        let warnings = table
            .rows
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let line = first_row_line + i;
                if !s.holds() {
                    Some(format!("line {line}: d={} r={} {s} does not satisfy the equation", s.d, s.r))
                } else if !s.is_primitive() {
                    Some(format!("line {line}: d={} r={} {s} is not primitive", s.d, s.r))
                } else {
                    None
                }
            })
            .collect();
        Ok(ReferenceTable { label, table, warnings })
    }

    /// The single `d` of every row, if they agree.
    pub fn d(&self) -> Option<u32> {
        let ds: BTreeSet<u32> = self.table.rows.iter().map(|s| s.d).collect();
        match (self.label, ds.len()) {
            (Some(l), _) => Some(l.d()),
            (None, 1) => ds.into_iter().next(),
            _ => None,
        }
    }

    /// `One(n)` when every row has the same exponent, else `Primes`.
    pub fn selector(&self) -> ExponentSelector {
        if let Some(l) = self.label {
            return l.selector();
        }
        let ns: BTreeSet<u32> = self.table.rows.iter().map(|s| s.n).collect();
        match ns.iter().next() {
            Some(&n) if ns.len() == 1 => ExponentSelector::One(n),
            _ => ExponentSelector::Primes,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub d: u32,
    pub selector: ExponentSelector,
    pub r_range: RangeInclusive<u64>,
    pub opts: SolveOptions,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Sorted by `(r, n, x)`.
    pub rows: Vec<Certified>,
    /// Verdicts other than solved or proved empty, with how many `r` share each.
    pub notes: Vec<String>,
    pub metadata: Vec<String>,
}

impl SweepResult {
    pub fn solutions(&self) -> Vec<Solution> {
        self.rows.iter().map(|c| c.solution.clone()).collect()
    }

    pub fn table(&self) -> Table {
        let comments = self.metadata.iter().chain(&self.notes).map(|l| format!(" {l}")).collect();
        Table { comments, rows: self.solutions() }
    }
}

fn sweep_inner(cfg: &SweepConfig) -> Result<(Vec<Certified>, Vec<String>)> {
    if cfg.d == 2 && cfg.selector == ExponentSelector::One(4) {
        // one scan of the descent box covers every r at once
        let rows = solve_n4_range(cfg.r_range.clone(), cfg.opts.thue_bound).into_values().flatten().collect();
        return Ok((rows, Vec::new()));
    }
    let per_r: Vec<(Vec<Certified>, Vec<String>)> = cfg
        .r_range
        .clone()
        .into_par_iter()
        .map(|r| {
            let rep = solve(cfg.d, r, cfg.selector, &cfg.opts)?;
            let notes = rep
                .entries
                .iter()
                .filter(|e| {
                    matches!(
                        e.verdict,
                        Verdict::Eliminated(_) | Verdict::Open | Verdict::Unsupported { .. } | Verdict::Deferred
                    )
                })
                .map(|e| format!("{}: {}", e.scope, e.verdict))
                .collect();
            Ok((rep.certified(), notes))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for (c, notes) in per_r {
        rows.extend(c);
        for n in notes {
            *counts.entry(n).or_default() += 1;
        }
    }
    let notes = counts.into_iter().map(|(n, k)| format!("d={} ({k} values of r) {n}", cfg.d)).collect();
    Ok((rows, notes))
}

/// Solve every `r` in the range and merge. The output does not depend on the
/// number of workers.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.r_range.is_empty() || *cfg.r_range.start() == 0 {
        return Err(Error::InvalidArgument(format!(
            "r range {}..={} must satisfy 1 <= r_min <= r_max",
            cfg.r_range.start(),
            cfg.r_range.end()
        )));
    }
    let (mut rows, notes) = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| sweep_inner(cfg))?,
        None => sweep_inner(cfg)?,
    };
    rows.sort_by(|a, b| a.solution.cmp(&b.solution));
    rows.dedup_by(|a, b| a.solution == b.solution);
    let metadata = vec![
        format!("apsq {}", env!("CARGO_PKG_VERSION")),
        format!("d={} n={} r={}..={}", cfg.d, cfg.selector, cfg.r_range.start(), cfg.r_range.end()),
        format!("thue_bound={} family_k={}", cfg.opts.thue_bound, cfg.opts.family_k),
    ];
    Ok(SweepResult { rows, notes, metadata })
}

/// Rows compared up to the sign of `y` for even `n`.
fn normalize(s: &Solution) -> Solution {
    if s.n % 2 == 0 {
        s.with_abs_y()
    } else {
        s.clone()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub matched: Vec<Solution>,
    /// In the reference but not produced.
    pub missing: Vec<Solution>,
    /// Produced but not in the reference.
    pub extra: Vec<Solution>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        writeln!(f, "matched: {}", self.matched.len())?;
        writeln!(f, "missing: {}", self.missing.len())?;
        for s in &self.missing {
            writeln!(f, "  - d={} r={} {s}", s.d, s.r)?;
        }
        writeln!(f, "extra: {}", self.extra.len())?;
        for s in &self.extra {
            writeln!(f, "  + d={} r={} {s}", s.d, s.r)?;
        }
        Ok(())
    }
}

pub fn verify(reference: &ReferenceTable, produced: &[Solution]) -> VerifyReport {
    let want: BTreeSet<Solution> = reference.table.rows.iter().map(normalize).collect();
    let got: BTreeSet<Solution> = produced.iter().map(normalize).collect();
    VerifyReport {
        matched: want.intersection(&got).cloned().collect(),
        missing: want.difference(&got).cloned().collect(),
        extra: got.difference(&want).cloned().collect(),
        warnings: reference.warnings.clone(),
    }
}

fn number(n: &BigInt) -> Value {
    Value::Number(n.to_string().parse().expect("integers are valid JSON numbers"))
}

fn witness_json(w: &DescentWitness) -> Value {
    let mut v = json!({
        "ring": w.ring,
        "u": number(&w.u),
        "v": number(&w.v),
        "divisor": number(&w.divisor),
        "unit_case": w.unit_case,
    });
    if let Some(x) = &w.big_x {
        v["big_x"] = number(x);
    }
    v
}

/// An array of `{d, r, x, y, n, witness?}` objects.
pub fn to_json(rows: &[Certified]) -> String {
    let arr: Vec<Value> = rows
        .iter()
        .map(|c| {
            let s = &c.solution;
            let mut v = json!({"d": s.d, "r": s.r, "x": number(&s.x), "y": number(&s.y), "n": s.n});
            if let Some(w) = &c.witness {
                v["witness"] = witness_json(w);
            }
            v
        })
        .collect();
    serde_json::to_string_pretty(&Value::Array(arr)).expect("serializable") + "\n"
}

/// A longtable with one row per `r`.
pub fn to_latex(rows: &[Solution], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("%{c}\n"));
    }
    out.push_str("\\begin{longtable}{rl}\n\\hline\n$r$ & $(x, y, n)$ \\\\\n\\hline\n");
    let mut i = 0;
    while i < rows.len() {
        let r = rows[i].r;
        let mut cells = Vec::new();
        while i < rows.len() && rows[i].r == r {
            cells.push(format!("$({}, {}, {})$", rows[i].x, rows[i].y, rows[i].n));
            i += 1;
        }
        out.push_str(&format!("{r} & {} \\\\\n", cells.join(", ")));
    }
    out.push_str("\\hline\n\\end{longtable}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_are_valid() {
        let t2 = ReferenceTable::bundled(ReferenceLabel::Ap2N4);
        assert!(t2.warnings.is_empty(), "{:?}", t2.warnings);
        let rs: BTreeSet<u64> = t2.table.rows.iter().map(|s| s.r).collect();
        assert_eq!(rs.len(), 39);
        let t3 = ReferenceTable::bundled(ReferenceLabel::Ap6Prime);
        assert!(t3.warnings.is_empty(), "{:?}", t3.warnings);
        let rs: BTreeSet<u64> = t3.table.rows.iter().map(|s| s.r).collect();
        assert_eq!(rs.len(), 49);
        assert_eq!(t3.table.rows.len(), 98);
        for t in [&t2, &t3] {
            for s in &t.table.rows {
                assert!(t.table.rows.contains(&s.reflect()), "{s}");
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let text = "# one\n#two\nd,r,x,y,n\n2,1,-121,13,4\n6,2933,-21396,19,7\n";
        let t = Table::parse_csv(text).unwrap();
        assert_eq!(t.comments, vec![" one".to_string(), "two".to_string()]);
        assert_eq!(t.to_csv(), text);
        assert_eq!(Table::parse_csv(AP2_N4).unwrap().to_csv(), AP2_N4);
    }

    #[test]
    fn csv_errors_carry_lines() {
        let err = Table::parse_csv("d,r,x,y,n\n2,1,5,13,4\n2,1,abc,13,4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = Table::parse_csv("#c\nd,r,x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert!(Table::parse_csv("d,r,x,y,n\n2,1,5,13\n").is_err());
    }

    #[test]
    fn corrupted_row_is_one_missing_one_extra() {
        let good = ReferenceTable::bundled(ReferenceLabel::Ap6Prime);
        let text = good.table.to_csv().replacen("6,2933,865,19,7", "6,2933,865,20,7", 1);
        let bad = ReferenceTable::parse(&text, None).unwrap();
        assert_eq!(bad.warnings.len(), 1);
        let produced: Vec<Solution> = good.table.rows.clone();
        let rep = verify(&bad, &produced);
        assert_eq!((rep.missing.len(), rep.extra.len()), (1, 1));
        assert_eq!(rep.extra[0], Solution::new(6, 2933, 865, 19, 7));
        assert!(verify(&good, &produced).is_clean());
    }

    #[test]
    fn even_exponents_compare_abs_y() {
        let reference = ReferenceTable::parse("d,r,x,y,n\n2,1,118,13,4\n", None).unwrap();
        let rep = verify(&reference, &[Solution::new(2, 1, 118, -13, 4)]);
        assert!(rep.is_clean());
    }

    #[test]
    fn json_shape() {
        let rows = crate::solver_d6::solve_odd_prime_d6(13, 3).unwrap();
        let v: Value = serde_json::from_str(&to_json(&rows)).unwrap();
        assert_eq!(v[0]["x"], json!(-71));
        assert_eq!(v[0]["witness"]["big_x"].as_i64().map(i64::abs), Some(153));
        assert_eq!(v[1]["witness"]["unit_case"], json!("six_descent"));
        let big = Certified { solution: Solution::new(2, 1, BigInt::from(10).pow(30), 1, 3), witness: None };
        assert!(to_json(&[big]).contains("1000000000000000000000000000000"));
    }

    #[test]
    fn latex_groups_by_r() {
        let rows = ReferenceTable::bundled(ReferenceLabel::Ap6Prime).table.rows;
        let tex = to_latex(&rows[..4], &[" note".into()]);
        assert!(tex.starts_with("% note\n"));
        assert!(tex.contains("13 & $(-71, 19, 3)$, $(-20, 19, 3)$ \\\\\n"));
        assert!(tex.contains("23 & $(-139, 31, 3)$, $(-22, 31, 3)$ \\\\\n"));
    }

    #[test]
    fn small_sweeps() {
        let cfg = |d, selector, r_max, jobs| SweepConfig {
            d,
            selector,
            r_range: 1..=r_max,
            opts: SolveOptions::default(),
            jobs,
        };
        let res = sweep(&cfg(6, ExponentSelector::Primes, 100, None)).unwrap();
        let rs: BTreeSet<u64> = res.rows.iter().map(|c| c.solution.r).collect();
        assert_eq!(rs, [13, 23, 55].into_iter().collect());
        let res = sweep(&cfg(4, ExponentSelector::All, 100, Some(2))).unwrap();
        assert!(res.rows.is_empty());
        assert_eq!(res.notes.len(), 3, "{:?}", res.notes);
        assert!(res.notes.iter().any(|n| n.starts_with("d=4 (50 values of r) all n: Eliminated [two-adic-valuation]")));
        assert!(res.notes.iter().any(|n| n == "d=4 (50 values of r) n=2: Open"));
        let a = sweep(&cfg(2, ExponentSelector::All, 60, Some(1))).unwrap();
        let b = sweep(&cfg(2, ExponentSelector::All, 60, Some(4))).unwrap();
        assert_eq!(a.table().to_csv(), b.table().to_csv());
        assert!(sweep(&SweepConfig {
            r_range: std::ops::RangeInclusive::new(5, 4),
            ..cfg(2, ExponentSelector::All, 1, None)
        })
        .is_err());
    }
}

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use apsq::harness::{sweep, to_json, to_latex, verify, ReferenceLabel, ReferenceTable, SweepConfig};
use apsq::oracle::oracle_enumerate;
use apsq::pipeline::{solve, ExponentSelector};
use apsq::solver_d2::{ConjugateChoice, SolveOptions, DEFAULT_FAMILY_K, DEFAULT_THUE_BOUND};
use apsq::Verdict;

const EXIT_MISMATCH: u8 = 1;
const EXIT_UNSUPPORTED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 74;

/// Primitive solutions of (x+r)^2 + (x+2r)^2 + ... + (x+dr)^2 = y^n.
#[derive(Parser, Debug)]
#[command(name = "apsq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify and solve one (d, r).
    Solve(SolveCmd),
    /// Solve a range of r and emit a table.
    Sweep(SweepCmd),
    /// Brute-force enumeration over y.
    Oracle(OracleCmd),
    /// Diff a sweep against a reference table.
    Verify(VerifyCmd),
}

#[derive(Args, Debug, Clone, Copy)]
struct SolverFlags {
    /// Box size for the quartic descent search.
    #[arg(long, env = "APSQ_THUE_BOUND", default_value_t = DEFAULT_THUE_BOUND)]
    thue_bound: u64,
    /// Largest |k| listed for the n = 2 family.
    #[arg(long, env = "APSQ_FAMILY_K", default_value_t = DEFAULT_FAMILY_K)]
    family_k: i64,
}

impl From<SolverFlags> for SolveOptions {
    fn from(f: SolverFlags) -> Self {
        SolveOptions { thue_bound: f.thue_bound, family_k: f.family_k }
    }
}

#[derive(Args, Debug)]
struct SolveCmd {
    #[arg(long)]
    d: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    r: u64,
    /// An exponent, `primes` or `all`.
    #[arg(long, default_value = "all")]
    n: ExponentSelector,
    /// List the n = 2 family members for |k| <= family-k.
    #[arg(long)]
    members: bool,
    #[command(flatten)]
    flags: SolverFlags,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Emit {
    Csv,
    Json,
    Latex,
}

#[derive(Args, Debug)]
struct SweepCmd {
    #[arg(long)]
    d: u32,
    #[arg(long, default_value = "all")]
    n: ExponentSelector,
    #[arg(long, default_value_t = 1)]
    r_min: u64,
    #[arg(long)]
    r_max: u64,
    #[arg(long, value_enum, default_value = "csv")]
    emit: Emit,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Write here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    flags: SolverFlags,
}

#[derive(Args, Debug)]
struct OracleCmd {
    #[arg(long)]
    d: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    r: u64,
    #[arg(long, default_value_t = 2)]
    n_min: u32,
    #[arg(long)]
    n_max: u32,
    #[arg(long, env = "APSQ_ORACLE_YMAX", default_value_t = 10_000)]
    y_max: u64,
}

#[derive(Args, Debug)]
struct VerifyCmd {
    /// `ap2-n4`, `ap6-prime`, or a CSV path.
    #[arg(long)]
    reference: String,
    /// Defaults to the reference's d.
    #[arg(long)]
    d: Option<u32>,
    /// Defaults to the reference's exponents.
    #[arg(long)]
    n: Option<ExponentSelector>,
    #[arg(long, default_value_t = 1)]
    r_min: u64,
    #[arg(long, default_value_t = 10_000)]
    r_max: u64,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    flags: SolverFlags,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn fail(code: u8) -> impl FnOnce(anyhow::Error) -> Failure {
    move |err| Failure { code, err }
}

fn core_failure(e: apsq::Error) -> Failure {
    let code = match e {
        apsq::Error::Parse { .. } => EXIT_DATA,
        apsq::Error::InvalidArgument(_) | apsq::Error::NonPositive(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    };
    Failure { code, err: e.into() }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(fail(EXIT_IO)),
        None => io::stdout().lock().write_all(text.as_bytes()).context("writing stdout").map_err(fail(EXIT_IO)),
    }
}

fn run_solve(cmd: SolveCmd) -> Result<u8, Failure> {
    let opts = SolveOptions::from(cmd.flags);
    let report = solve(cmd.d, cmd.r, cmd.n, &opts).map_err(core_failure)?;
    let mut text = report.to_string();
    if cmd.members {
        for e in &report.entries {
            if let Verdict::Family(fam) = &e.verdict {
                for m in fam.members(-opts.family_k..=opts.family_k, &ConjugateChoice::All) {
                    text.push_str(&format!("  k={} sign={:+} {}\n", m.k, m.sign, m.solution));
                }
            }
        }
    }
    write_out(None, &text)?;
    Ok(if report.is_unsupported() { EXIT_UNSUPPORTED } else { 0 })
}

fn run_sweep(cmd: SweepCmd) -> Result<u8, Failure> {
    if !(2..=10).contains(&cmd.d) || cmd.d == 3 {
        eprintln!("d={} is not handled by this tool", cmd.d);
        return Ok(EXIT_UNSUPPORTED);
    }
    let cfg = SweepConfig {
        d: cmd.d,
        selector: cmd.n,
        r_range: cmd.r_min..=cmd.r_max,
        opts: cmd.flags.into(),
        jobs: cmd.jobs,
    };
    let res = sweep(&cfg).map_err(core_failure)?;
    let table = res.table();
    let text = match cmd.emit {
        Emit::Csv => table.to_csv(),
        Emit::Json => {
            for note in &res.notes {
                eprintln!("note: {note}");
            }
            to_json(&res.rows)
        }
        Emit::Latex => to_latex(&table.rows, &table.comments),
    };
    write_out(cmd.out.as_ref(), &text)?;
    Ok(0)
}

fn run_oracle(cmd: OracleCmd) -> Result<u8, Failure> {
    if cmd.n_min < 2 || cmd.n_min > cmd.n_max {
        return Err(fail(EXIT_USAGE)(anyhow::anyhow!("need 2 <= n-min <= n-max")));
    }
    let ns: BTreeSet<u32> = (cmd.n_min..=cmd.n_max).collect();
    let mut found = oracle_enumerate(cmd.d, cmd.r, &ns, cmd.y_max);
    found.sort_by(|a, b| (a.n, &a.x).cmp(&(b.n, &b.x)));
    let text: String = found.iter().map(|s| format!("{s}\n")).collect();
    write_out(None, &text)?;
    Ok(0)
}

fn run_verify(cmd: VerifyCmd) -> Result<u8, Failure> {
    let mut reference = match cmd.reference.parse::<ReferenceLabel>() {
        Ok(label) => ReferenceTable::bundled(label),
        Err(_) => {
            let text = fs::read_to_string(&cmd.reference)
                .with_context(|| format!("reading {}", cmd.reference))
                .map_err(fail(EXIT_IO))?;
            ReferenceTable::parse(&text, None).map_err(|e| Failure {
                code: EXIT_DATA,
                err: anyhow::Error::from(e).context(format!("parsing {}", cmd.reference)),
            })?
        }
    };
    let d = match (cmd.d, reference.d()) {
        (Some(d), _) | (None, Some(d)) => d,
        (None, None) => return Err(fail(EXIT_USAGE)(anyhow::anyhow!("reference mixes several d; pass --d"))),
    };
    let cfg = SweepConfig {
        d,
        selector: cmd.n.unwrap_or_else(|| reference.selector()),
        r_range: cmd.r_min..=cmd.r_max,
        opts: cmd.flags.into(),
        jobs: cmd.jobs,
    };
    // rows outside the swept range cannot be checked
    reference.table.rows.retain(|s| cfg.r_range.contains(&s.r));
    let res = sweep(&cfg).map_err(core_failure)?;
    let report = verify(&reference, &res.solutions());
    write_out(None, &report.to_string())?;
    Ok(if report.is_clean() { 0 } else { EXIT_MISMATCH })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Solve(c) => run_solve(c),
        Command::Sweep(c) => run_sweep(c),
        Command::Oracle(c) => run_oracle(c),
        Command::Verify(c) => run_verify(c),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

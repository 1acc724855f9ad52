//! `exunit`: count exceptional-unit solutions of diagonal congruences from the
//! command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or argument error,
//! 3 capacity exceeded.

use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exunit_core::campaign::{self, LemmaCheck, Method};
use exunit_core::charsums::{self, SumCheck};
use exunit_core::{arith, exunits, hensel, CongruenceQuery, Error, Exec};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "exunit", version, about = "Exceptional-unit solution counts of x_1^e + ... + x_k^e = c (mod n)")]
struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count solutions for one (n, k, c, e).
    Count(CountArgs),
    /// Count solutions for every c in [0, n).
    Sweep(SweepArgs),
    /// Compare the closed form against the convolution oracle.
    Verify(VerifyArgs),
    /// Run the property suites the closed form rests on.
    Lemmas(LemmaArgs),
    /// Time several methods on the same queries; counts must agree.
    Bench(BenchArgs),
    /// List the exceptional units modulo n.
    Exunits {
        #[arg(long)]
        n: u64,
    },
    /// Evaluate a quadratic Gauss sum against its predicted value.
    Gauss(SumArgs),
    /// Evaluate a Legendre character sum against its predicted value.
    Charsum(SumArgs),
    /// Factor a positive integer.
    Factor {
        #[arg(long)]
        n: u64,
    },
    /// Hensel lifting of roots and of congruence solutions.
    #[command(subcommand)]
    Lift(LiftCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Convolution,
    Naive,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Closed => Method::Closed,
            MethodArg::Convolution => Method::Convolution,
            MethodArg::Naive => Method::Naive,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    c: i128,
    #[arg(long)]
    e: u32,
    /// Defaults to closed for e in {1, 2}, convolution otherwise.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    e: u32,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    max_n: u64,
    /// Comma-separated list of k values.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<u32>,
    #[arg(long)]
    e: u32,
}

#[derive(Args)]
struct LemmaArgs {
    /// Restrict to one group: multiplicative, lifting, exunits, gauss, charsum.
    #[arg(long)]
    only: Option<String>,
    /// Force one failing case into the named suite (harness self-test).
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated moduli.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u64>,
    #[arg(long)]
    k: u32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    c: i128,
    #[arg(long)]
    e: u32,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "closed,convolution")]
    methods: Vec<MethodArg>,
}

#[derive(Args)]
struct SumArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, allow_hyphen_values = true)]
    alpha: i128,
}

#[derive(Subcommand)]
enum LiftCommand {
    /// Lift a simple root of a polynomial from p to p^s.
    Root {
        /// Coefficients, constant term first, e.g. -2,0,1 for x^2 - 2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<i128>,
        #[arg(long)]
        a0: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
    },
    /// Lift a solution modulo p to one modulo p^s.
    Solution {
        /// Base solution, one exceptional unit mod p per variable.
        #[arg(long, value_delimiter = ',', required = true)]
        sol: Vec<u64>,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        c: i128,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        s: u32,
        /// k - 1 multiples of p below p^s.
        #[arg(long, value_delimiter = ',')]
        offsets: Vec<u64>,
    },
}

#[derive(Serialize)]
struct QueryOut {
    n: u64,
    k: u32,
    c: u64,
    e: u32,
}

impl From<&CongruenceQuery> for QueryOut {
    fn from(q: &CongruenceQuery) -> Self {
        QueryOut {
            n: q.n(),
            k: q.k(),
            c: q.c(),
            e: q.e(),
        }
    }
}

#[derive(Serialize)]
struct ReportRecord {
    query: QueryOut,
    method: &'static str,
    count: String,
    /// Microseconds.
    elapsed: u128,
}

#[derive(Serialize)]
struct SweepSummary {
    total: String,
    expected: String,
    elapsed: u128,
}

#[derive(Serialize)]
struct SweepOut {
    records: Vec<ReportRecord>,
    summary: SweepSummary,
}

#[derive(Serialize)]
struct MismatchOut {
    n: u64,
    k: u32,
    c: u64,
    e: u32,
    closed: String,
    oracle: String,
}

#[derive(Serialize)]
struct VerifyOut {
    max_n: u64,
    k: Vec<u32>,
    e: u32,
    comparisons: u64,
    mismatches: Vec<MismatchOut>,
}

#[derive(Serialize)]
struct SumOut {
    p: u64,
    alpha: u64,
    computed: [f64; 2],
    predicted: [f64; 2],
    residual: f64,
    modulus_defect: f64,
    pass: bool,
}

impl From<SumCheck> for SumOut {
    fn from(s: SumCheck) -> Self {
        SumOut {
            p: s.p,
            alpha: s.alpha,
            computed: [s.computed.re, s.computed.im],
            predicted: [s.predicted.re, s.predicted.im],
            residual: s.residual,
            modulus_defect: s.modulus_defect(),
            pass: s.passes(),
        }
    }
}

enum Failure {
    Core(Error),
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("write failed: {e}"))
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Capacity { .. } => 3,
        Error::Mismatch(_) | Error::Invariant(_) => 1,
        _ => 2,
    }
}

fn print_json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match cli.command {
        Command::Count(a) => {
            let q = CongruenceQuery::new(a.n, a.k, a.c, a.e)?;
            let method = a.method.map_or(Method::default_for(a.e), Method::from);
            let start = Instant::now();
            let count = campaign::evaluate(&q, method, exec)?;
            print_json(
                out,
                &ReportRecord {
                    query: (&q).into(),
                    method: method.as_str(),
                    count: count.to_string(),
                    elapsed: start.elapsed().as_micros(),
                },
            )?;
        }
        Command::Sweep(a) => {
            let base = CongruenceQuery::new(a.n, a.k, 0, a.e)?;
            let method = a.method.map_or(Method::default_for(a.e), Method::from);
            let start = Instant::now();
            let counts = campaign::sweep(a.n, a.k, a.e, method, exec)?;
            let elapsed = start.elapsed().as_micros();
            let total: exunit_core::Count = counts.iter().sum();
            let expected = exunits::count_exunits(&arith::factorize(a.n)).pow(a.k);
            match a.format {
                Format::Csv => {
                    writeln!(out, "c,count")?;
                    for (c, count) in counts.iter().enumerate() {
                        writeln!(out, "{c},{count}")?;
                    }
                    writeln!(out, "total,{total}")?;
                    writeln!(out, "expected,{expected}")?;
                }
                Format::Json => {
                    let share = elapsed / counts.len().max(1) as u128;
                    let records = counts
                        .iter()
                        .enumerate()
                        .map(|(c, count)| ReportRecord {
                            query: (&base.with_c(c as i128)).into(),
                            method: method.as_str(),
                            count: count.to_string(),
                            elapsed: share,
                        })
                        .collect();
                    print_json(
                        out,
                        &SweepOut {
                            records,
                            summary: SweepSummary {
                                total: total.to_string(),
                                expected: expected.to_string(),
                                elapsed,
                            },
                        },
                    )?;
                }
            }
        }
        Command::Verify(a) => {
            let report = campaign::verify(a.max_n, &a.k, a.e, exec)?;
            let mismatches: Vec<MismatchOut> = report
                .mismatches
                .iter()
                .map(|m| MismatchOut {
                    n: m.query.n(),
                    k: m.query.k(),
                    c: m.query.c(),
                    e: m.query.e(),
                    closed: m.closed.to_string(),
                    oracle: m.oracle.to_string(),
                })
                .collect();
            let failed = !mismatches.is_empty();
            print_json(
                out,
                &VerifyOut {
                    max_n: a.max_n,
                    k: a.k,
                    e: a.e,
                    comparisons: report.comparisons,
                    mismatches,
                },
            )?;
            if failed {
                return Err(Failure::Mismatch(format!(
                    "{} mismatches between closed form and oracle",
                    report.mismatches.len()
                )));
            }
        }
        Command::Lemmas(a) => {
            let checks = match a.only.as_deref() {
                None => LemmaCheck::ALL.to_vec(),
                Some(word) => LemmaCheck::group(word)
                    .ok_or_else(|| Failure::Usage(format!("unknown lemma group {word:?}")))?,
            };
            let fault = match a.inject_fault.as_deref() {
                None => None,
                Some(word) => Some(
                    LemmaCheck::group(word)
                        .and_then(|g| g.first().copied())
                        .ok_or_else(|| Failure::Usage(format!("unknown lemma group {word:?}")))?,
                ),
            };
            let outcomes = campaign::run_lemmas(&checks, fault, exec);
            for o in &outcomes {
                writeln!(
                    out,
                    "{} {} cases={} failures={} [{}]",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.check.name(),
                    o.cases,
                    o.failures,
                    o.coverage
                )?;
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(Failure::Mismatch(format!("{failed} property suites failed")));
            }
        }
        Command::Bench(a) => {
            let methods: Vec<Method> = a.methods.into_iter().map(Method::from).collect();
            let rows = campaign::bench(&a.n, a.k, a.c, a.e, &methods, exec)?;
            writeln!(out, "n,method,elapsed_us,count")?;
            for r in rows {
                writeln!(out, "{},{},{},{}", r.n, r.method, r.elapsed_us, r.count)?;
            }
        }
        Command::Exunits { n } => {
            let set = exunits::enumerate_exunits(n)?;
            #[derive(Serialize)]
            struct Out<'a> {
                n: u64,
                count: String,
                members: &'a [u64],
            }
            print_json(
                out,
                &Out {
                    n,
                    count: set.len().to_string(),
                    members: set.members(),
                },
            )?;
        }
        Command::Gauss(a) => print_json(out, &SumOut::from(charsums::gauss_sum(a.p, a.alpha)?))?,
        Command::Charsum(a) => print_json(out, &SumOut::from(charsums::char_sum(a.p, a.alpha)?))?,
        Command::Factor { n } => {
            if n == 0 {
                return Err(Failure::Usage("n must be positive".into()));
            }
            let f = arith::factorize(n);
            #[derive(Serialize)]
            struct Out<'a> {
                value: u64,
                factors: &'a [(u64, u32)],
                omega: usize,
            }
            print_json(
                out,
                &Out {
                    value: f.value(),
                    factors: f.factors(),
                    omega: f.omega(),
                },
            )?;
        }
        Command::Lift(LiftCommand::Root { coeffs, a0, p, s }) => {
            let r = hensel::lift_root(&coeffs, a0, p, s)?;
            #[derive(Serialize)]
            struct Out {
                root: u64,
                base_root: u64,
                p: u64,
                s: u32,
                modulus: u64,
            }
            print_json(
                out,
                &Out {
                    root: r.root,
                    base_root: r.base_root,
                    p: r.p,
                    s: r.s,
                    modulus: r.modulus(),
                },
            )?;
        }
        Command::Lift(LiftCommand::Solution {
            sol,
            p,
            c,
            e,
            s,
            offsets,
        }) => {
            let k = u32::try_from(sol.len()).map_err(|_| Failure::Usage("too many coordinates".into()))?;
            let q = CongruenceQuery::new(p, k, c, e)?;
            let offsets = if offsets.is_empty() { vec![0; sol.len().saturating_sub(1)] } else { offsets };
            let lifted = hensel::lift_solution(&sol, &q, s, &offsets)?;
            #[derive(Serialize)]
            struct Out {
                modulus: u64,
                solution: Vec<u64>,
            }
            print_json(
                out,
                &Out {
                    modulus: p.pow(s),
                    solution: lifted,
                },
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

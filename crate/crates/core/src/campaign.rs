//! Evaluation front door plus the cross-checking campaigns: sweeps over `c`,
//! closed-form versus oracle verification, the lemma property suites and the
//! timing harness.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::arith::{factorize, is_prime};
use crate::charsums::{char_sum, gauss_sum, SumCheck};
use crate::closed_form;
use crate::error::{Error, Result};
use crate::exunits::{count_exunits, enumerate_exunits};
use crate::oracle;
use crate::par::Exec;
use crate::query::{CongruenceQuery, Count};

/// How a count is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Closed,
    Convolution,
    Naive,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Closed, Method::Convolution, Method::Naive];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Convolution => "convolution",
            Method::Naive => "naive",
        }
    }

    /// Closed form where one exists, convolution otherwise.
    pub fn default_for(e: u32) -> Method {
        if e <= 2 {
            Method::Closed
        } else {
            Method::Convolution
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

pub fn evaluate(q: &CongruenceQuery, method: Method, exec: Exec) -> Result<Count> {
    match method {
        Method::Closed => closed_form::count_with(q, exec),
        Method::Convolution => oracle::count_convolution_with(q, exec),
        Method::Naive => oracle::count_naive_with(q, exec),
    }
}

/// Counts for every `c` in `[0, n)`.
pub fn sweep(n: u64, k: u32, e: u32, method: Method, exec: Exec) -> Result<Vec<Count>> {
    match method {
        Method::Closed => closed_form::distribution(n, k, e, exec),
        Method::Convolution => oracle::distribution(n, k, e, exec),
        Method::Naive => {
            let base = CongruenceQuery::new(n, k, 0, e)?;
            // fail fast on capacity before fanning out
            oracle::count_naive_with(&base, Exec::Sequential)?;
            exec.try_map((0..n).collect(), |c| {
                oracle::count_naive_with(&base.with_c(c as i128), Exec::Sequential)
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub query: CongruenceQuery,
    pub closed: Count,
    pub oracle: Count,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub comparisons: u64,
    /// Sorted by `n`, then `k`, then `c`.
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the closed form with the convolution oracle for every
/// `1 <= n <= max_n`, every `k` in `ks` and every `c`.
pub fn verify(max_n: u64, ks: &[u32], e: u32, exec: Exec) -> Result<VerifyReport> {
    if e == 0 || e > 2 {
        return Err(Error::UnsupportedExponent(e));
    }
    if ks.is_empty() {
        return Err(Error::InvalidArgument("no k values given".into()));
    }
    if max_n == 0 {
        return Err(Error::InvalidArgument("max n must be positive".into()));
    }
    if max_n > oracle::CONVOLUTION_LIMIT {
        return Err(Error::capacity(
            "verification max n",
            oracle::CONVOLUTION_LIMIT as u128,
            max_n as u128,
        ));
    }
    let items: Vec<(u64, u32)> = (1..=max_n)
        .flat_map(|n| ks.iter().map(move |&k| (n, k)))
        .collect();
    let results = exec.try_map(items, |(n, k)| {
        let closed = closed_form::distribution(n, k, e, Exec::Sequential)?;
        let brute = oracle::distribution(n, k, e, Exec::Sequential)?;
        let mut bad = Vec::new();
        for (c, (a, b)) in closed.into_iter().zip(brute).enumerate() {
            if a != b {
                bad.push(Mismatch {
                    query: CongruenceQuery::new(n, k, c as i128, e)?,
                    closed: a,
                    oracle: b,
                });
            }
        }
        Ok::<_, Error>((n, bad))
    })?;
    let mut report = VerifyReport::default();
    for (n, bad) in results {
        report.comparisons += n;
        report.mismatches.extend(bad);
    }
    Ok(report)
}

/// The property suites behind the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaCheck {
    /// `N(n1 n2) = N(n1) N(n2)` for coprime moduli.
    Multiplicativity,
    /// `N(p^s) = p^((k-1)(s-1)) N(p)` when `p` does not divide `e`.
    PrimePowerLifting,
    /// `|Z_n**|` by enumeration against the product formula.
    ExUnitCount,
    GaussSum,
    CharacterSum,
}

impl LemmaCheck {
    pub const ALL: [LemmaCheck; 5] = [
        LemmaCheck::Multiplicativity,
        LemmaCheck::PrimePowerLifting,
        LemmaCheck::ExUnitCount,
        LemmaCheck::GaussSum,
        LemmaCheck::CharacterSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaCheck::Multiplicativity => "multiplicativity",
            LemmaCheck::PrimePowerLifting => "prime-power-lifting",
            LemmaCheck::ExUnitCount => "exunit-count",
            LemmaCheck::GaussSum => "gauss-sum",
            LemmaCheck::CharacterSum => "character-sum",
        }
    }

    /// Resolves a filter word to the checks it selects.
    pub fn group(word: &str) -> Option<Vec<LemmaCheck>> {
        Some(match word {
            "multiplicative" | "multiplicativity" => vec![LemmaCheck::Multiplicativity],
            "lifting" | "prime-power-lifting" => vec![LemmaCheck::PrimePowerLifting],
            "exunits" | "exunit-count" => vec![LemmaCheck::ExUnitCount],
            "gauss" => vec![LemmaCheck::GaussSum, LemmaCheck::CharacterSum],
            "gauss-sum" => vec![LemmaCheck::GaussSum],
            "charsum" | "character-sum" => vec![LemmaCheck::CharacterSum],
            "all" => LemmaCheck::ALL.to_vec(),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaOutcome {
    pub check: LemmaCheck,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub coverage: String,
}

/// Tallies comparisons; with `fault` set, the first comparison is forced to
/// fail so the harness itself can be tested.
struct Tally {
    cases: u64,
    failures: u64,
    fault: bool,
}

impl Tally {
    fn new(fault: bool) -> Self {
        Tally {
            cases: 0,
            failures: 0,
            fault,
        }
    }

    fn record(&mut self, ok: bool) {
        let forced = std::mem::take(&mut self.fault);
        let ok = ok && !forced;
        self.cases += 1;
        self.failures += u64::from(!ok);
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failures += other.failures;
    }
}

type DistCache = HashMap<(u64, u32, u32), Vec<Count>>;

fn oracle_cache(keys: Vec<(u64, u32, u32)>, exec: Exec) -> Result<DistCache> {
    let dists = exec.try_map(keys.clone(), |(n, k, e)| {
        oracle::distribution(n, k, e, Exec::Sequential)
    })?;
    Ok(keys.into_iter().zip(dists).collect())
}

fn check_multiplicativity(fault: bool, exec: Exec) -> Result<(Tally, String)> {
    const MAX: u64 = 30;
    let combos: Vec<(u32, u32)> = [2, 3].iter().flat_map(|&k| (1..=3).map(move |e| (k, e))).collect();
    let pairs: Vec<(u64, u64)> = (1..=MAX)
        .flat_map(|a| (a + 1..=MAX).map(move |b| (a, b)))
        .filter(|&(a, b)| a.gcd(&b) == 1)
        .collect();
    let mut keys: Vec<(u64, u32, u32)> = Vec::new();
    for &(a, b) in &pairs {
        for &(k, e) in &combos {
            keys.extend([(a, k, e), (b, k, e), (a * b, k, e)]);
        }
    }
    keys.sort_unstable();
    keys.dedup();
    let cache = oracle_cache(keys, exec)?;
    let mut tally = Tally::new(fault);
    for &(a, b) in &pairs {
        for &(k, e) in &combos {
            let (whole, left, right) = (&cache[&(a * b, k, e)], &cache[&(a, k, e)], &cache[&(b, k, e)]);
            for c in 0..(a * b) as usize {
                tally.record(whole[c] == &left[c % a as usize] * &right[c % b as usize]);
            }
        }
    }
    let coverage = format!("{} coprime pairs <= {MAX}, k in {{2,3}}, e in {{1,2,3}}, all c", pairs.len());
    Ok((tally, coverage))
}

fn check_lifting(fault: bool, exec: Exec) -> Result<(Tally, String)> {
    let mut cases = Vec::new();
    for p in [3u64, 5, 7] {
        for s in 2..=3u32 {
            for k in 2..=3u32 {
                for e in 1..=3u32 {
                    if !(e as u64).is_multiple_of(p) {
                        cases.push((p, s, k, e));
                    }
                }
            }
        }
    }
    let mut keys: Vec<(u64, u32, u32)> = cases
        .iter()
        .flat_map(|&(p, s, k, e)| [(p, k, e), (p.pow(s), k, e)])
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let cache = oracle_cache(keys, exec)?;
    let mut tally = Tally::new(fault);
    for &(p, s, k, e) in &cases {
        let scale = BigUint::from(p).pow((k - 1) * (s - 1));
        let (lifted, base) = (&cache[&(p.pow(s), k, e)], &cache[&(p, k, e)]);
        for c in 0..p.pow(s) as usize {
            tally.record(lifted[c] == &scale * &base[c % p as usize]);
        }
    }
    Ok((tally, "p in {3,5,7}, s in {2,3}, k in {2,3}, e in {1,2,3} with p not dividing e, all c".into()))
}

fn check_exunit_count(fault: bool, exec: Exec) -> Result<(Tally, String)> {
    const MAX: u64 = 10_000;
    let results = exec.try_map((2..=MAX).collect(), |n| {
        let listed = enumerate_exunits(n)?.len();
        Ok::<_, Error>(BigUint::from(listed) == count_exunits(&factorize(n)))
    })?;
    let mut tally = Tally::new(fault);
    results.into_iter().for_each(|ok| tally.record(ok));
    Ok((tally, format!("2 <= n <= {MAX}")))
}

fn check_sums(fault: bool, exec: Exec, which: fn(u64, i128) -> Result<SumCheck>) -> Result<(Tally, String)> {
    const MAX_P: u64 = 500;
    let primes: Vec<u64> = (3..MAX_P).filter(|&p| is_prime(p)).collect();
    let per_prime = exec.try_map(primes.clone(), |p| {
        let mut t = Tally::new(false);
        for alpha in 1..p {
            t.record(which(p, alpha as i128)?.passes());
        }
        Ok::<_, Error>(t)
    })?;
    let mut tally = Tally::new(false);
    if fault {
        tally.record(false);
    }
    per_prime.into_iter().for_each(|t| tally.merge(t));
    Ok((tally, format!("{} odd primes < {MAX_P}, all alpha in [1, p)", primes.len())))
}

/// Runs the selected property suites. `inject_fault` forces one failing case
/// into the named suite.
pub fn run_lemmas(checks: &[LemmaCheck], inject_fault: Option<LemmaCheck>, exec: Exec) -> Vec<LemmaOutcome> {
    checks
        .iter()
        .map(|&check| {
            let fault = inject_fault == Some(check);
            let result = match check {
                LemmaCheck::Multiplicativity => check_multiplicativity(fault, exec),
                LemmaCheck::PrimePowerLifting => check_lifting(fault, exec),
                LemmaCheck::ExUnitCount => check_exunit_count(fault, exec),
                LemmaCheck::GaussSum => check_sums(fault, exec, gauss_sum),
                LemmaCheck::CharacterSum => check_sums(fault, exec, char_sum),
            };
            match result {
                Ok((tally, coverage)) => LemmaOutcome {
                    check,
                    passed: tally.failures == 0,
                    cases: tally.cases,
                    failures: tally.failures,
                    coverage,
                },
                Err(err) => LemmaOutcome {
                    check,
                    passed: false,
                    cases: 0,
                    failures: 1,
                    coverage: format!("aborted: {err}"),
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub n: u64,
    pub method: Method,
    pub elapsed_us: u128,
    pub count: Count,
}

/// Times each method on each `n`. Fails with [`Error::Mismatch`] if any two
/// methods disagree; no timings are returned in that case.
pub fn bench(ns: &[u64], k: u32, c: i128, e: u32, methods: &[Method], exec: Exec) -> Result<Vec<BenchRow>> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("no moduli given".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no methods given".into()));
    }
    let mut rows = Vec::with_capacity(ns.len() * methods.len());
    for &n in ns {
        let q = CongruenceQuery::new(n, k, c, e)?;
        let first = rows.len();
        for &method in methods {
            let start = Instant::now();
            let count = evaluate(&q, method, exec)?;
            rows.push(BenchRow {
                n,
                method,
                elapsed_us: start.elapsed().as_micros(),
                count,
            });
        }
        let group = &rows[first..];
        if let Some(other) = group.iter().find(|r| r.count != group[0].count) {
            return Err(Error::Mismatch(format!(
                "n={n} k={k} c={} e={e}: {} gives {}, {} gives {}",
                q.c(),
                group[0].method,
                group[0].count,
                other.method,
                other.count
            )));
        }
    }
    Ok(rows)
}

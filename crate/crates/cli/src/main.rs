use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use zerosum_core::constructions::{ClaimedProperty, ConstructionRegistry, ConstructionRequest};
use zerosum_core::formulas::{
    ap_lower_bound_value, block_threshold, pm1_smallsum_threshold, sufficient_block_bound,
};
use zerosum_core::good_shift::{min_good_shift, prime_shift, GoodShift};
use zerosum_core::io::{format_sequence, read_sequence, BodyEncoding};
use zerosum_core::oracle::{
    exact_threshold, verify_2k_proposition, verify_lemma_residue_properties, verify_pow2_rigidity,
    OracleConfig, SearchMode, ThresholdResult,
};
use zerosum_core::scanners::{ScanOptions, ScanReport, ScannerRegistry};
use zerosum_core::{Error, Params, SignSeq};

#[derive(Parser)]
#[command(
    name = "zerosum",
    version,
    about = "Zero-sum blocks and progressions in {-r, s}-sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct Letters {
    #[arg(long, default_value_t = 1)]
    r: u64,
    #[arg(long, default_value_t = 1)]
    s: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Exact block threshold N, or the slack bound (--q), or the small-sum
    /// threshold (--t, r = s = 1 only).
    Bound {
        #[command(flatten)]
        letters: Letters,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Build an extremal sequence and write it as a sequence file.
    Construct {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        alpha: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        factors: Option<Vec<u64>>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Encoding::Values)]
        encoding: Encoding,
        #[arg(long)]
        json: bool,
    },
    /// Scan a sequence file. Exit 0 when nothing is found, 1 on a witness.
    Verify {
        #[arg(long)]
        mode: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long = "in")]
        input: PathBuf,
        /// Report per-difference minima (ap mode).
        #[arg(long)]
        verbose: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive searches and finite verifications.
    Oracle {
        #[arg(long, value_enum)]
        target: Target,
        #[command(flatten)]
        letters: Letters,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 0)]
        q: u64,
        /// Largest length searched (default 3k).
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        v: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        factors: Option<Vec<u64>>,
        #[arg(long)]
        threads: Option<usize>,
        /// Window-evaluation ceiling (overrides ZEROSUM_BUDGET).
        #[arg(long)]
        budget: Option<u128>,
        #[arg(long)]
        json: bool,
    },
    /// Smallest good shift alpha.
    Shift {
        #[command(flatten)]
        letters: Letters,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        max_alpha: Option<u64>,
        /// Search for a prime shift instead.
        #[arg(long)]
        prime: bool,
        #[arg(long)]
        json: bool,
    },
    /// CSV of a quantity over a range of k (k not divisible by r + s skipped).
    Table {
        #[command(flatten)]
        letters: Letters,
        #[arg(long)]
        k_min: u64,
        #[arg(long)]
        k_max: u64,
        #[arg(long, value_enum)]
        what: What,
        /// Fixed shift for ap-lb (default: the smallest good shift per k).
        #[arg(long)]
        alpha: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoding {
    Values,
    Bits,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    BlockThreshold,
    ApThreshold,
    TwoK,
    Pow2,
    ResidueLemma,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    #[value(name = "N")]
    N,
    Shift,
    ApLb,
}

const OK: u8 = 0;
const FOUND: u8 = 1;

struct Report {
    command: &'static str,
    params: Map<String, Value>,
    started: Instant,
}

impl Report {
    fn new(command: &'static str, started: Instant) -> Self {
        Report {
            command,
            params: Map::new(),
            started,
        }
    }

    fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("params serialize");
        if !v.is_null() {
            self.params.insert(key.into(), v);
        }
        self
    }

    fn emit(self, result: impl Serialize) -> anyhow::Result<()> {
        let out = json!({
            "command": self.command,
            "params": self.params,
            "result": result,
            "toolVersion": env!("CARGO_PKG_VERSION"),
            "elapsedMillis": self.started.elapsed().as_millis() as u64,
            "indexing": "0-based",
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
        Ok(())
    }
}

fn values_line(seq: &SignSeq) -> String {
    seq.values()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn bound(
    letters: Letters,
    k: u64,
    q: Option<u64>,
    t: Option<u64>,
    json: bool,
    started: Instant,
) -> anyhow::Result<u8> {
    let params = Params::new(letters.r, letters.s, k)?;
    let report = Report::new("bound", started)
        .param("r", letters.r)
        .param("s", letters.s)
        .param("k", k)
        .param("q", q)
        .param("t", t);
    if let Some(t) = t {
        if !params.alphabet().is_pm1() {
            bail!(Error::Precondition("--t requires r = s = 1".into()));
        }
        let value = pm1_smallsum_threshold(k, t, q.unwrap_or(0))?;
        if json {
            report.emit(json!({ "threshold": value }))?;
        } else {
            println!(
                "small-sum threshold (k={k}, t={t}, q={}) = {value}",
                q.unwrap_or(0)
            );
        }
    } else if let Some(q) = q {
        let b = sufficient_block_bound(params, q)?;
        if json {
            report.emit(&b)?;
        } else {
            println!("sufficient length {params} q={q}: {}", b.n_sufficient);
        }
    } else {
        let b = block_threshold(params)?;
        if json {
            report.emit(&b)?;
        } else {
            println!("N{params} = {}", b.n_exact);
            println!(
                "t = {}, t' = {}, M1 = {}, M2 = {}",
                b.t, b.t_prime, b.m1, b.m2
            );
            for note in &b.notes {
                println!("note: {note}");
            }
        }
    }
    Ok(OK)
}

fn describe_claim(claim: &ClaimedProperty) -> String {
    match claim {
        ClaimedProperty::NoZeroSumBlock {
            k,
            window_weight: Some(w),
        } => {
            format!("no zero-sum {k}-block (every {k}-window weighs {w})")
        }
        ClaimedProperty::NoZeroSumBlock {
            k,
            window_weight: None,
        } => format!("no zero-sum {k}-block"),
        ClaimedProperty::NoZeroSumAp { k, gcd_bound: true } => {
            format!("no zero-sum {k}-term progression; |weight| >= gcd(d, {k})")
        }
        ClaimedProperty::NoZeroSumAp {
            k,
            gcd_bound: false,
        } => {
            format!("no zero-sum {k}-term progression")
        }
        ClaimedProperty::NonzeroResidueProgressions { k } => {
            format!("residue table over Z/{k}: every full progression with d | {k} is nonzero")
        }
    }
}

fn construct(
    kind: &str,
    request: ConstructionRequest,
    out: &Path,
    encoding: Encoding,
    json: bool,
    started: Instant,
) -> anyhow::Result<u8> {
    let registry = ConstructionRegistry::with_builtins();
    let c = registry.build(kind, &request)?;
    let enc = match encoding {
        Encoding::Values => BodyEncoding::Values,
        Encoding::Bits => BodyEncoding::Bits,
    };
    std::fs::write(out, format_sequence(&c.seq, enc))
        .with_context(|| format!("writing {}", out.display()))?;
    if c.degenerate {
        eprintln!("warning: degenerate construction, n = 0 at these parameters");
    }
    if json {
        Report::new("construct", started)
            .param("kind", kind)
            .param("r", request.r)
            .param("s", request.s)
            .param("k", request.k)
            .param("alpha", request.alpha)
            .param("factors", &request.factors)
            .param("p", request.p)
            .emit(json!({
                "kind": kind,
                "length": c.length,
                "degenerate": c.degenerate,
                "claimedProperty": c.claimed,
                "notes": c.notes,
                "path": out.display().to_string(),
            }))?;
    } else {
        println!("{kind}: n = {} written to {}", c.length, out.display());
        println!("claimed: {}", describe_claim(&c.claimed));
        for note in &c.notes {
            println!("note: {note}");
        }
    }
    Ok(OK)
}

fn print_scan(rep: &ScanReport) {
    match rep.witness {
        Some(w) => println!(
            "found: start {} difference {} (0-based), {} windows scanned",
            w.start, w.difference, rep.scanned_count
        ),
        None => println!(
            "none found: {} windows scanned, minAbsWeight {}",
            rep.scanned_count, rep.min_abs_weight
        ),
    }
    for row in rep.per_difference.iter().flatten() {
        println!(
            "d = {}: minAbsWeight {}",
            row.difference, row.min_abs_weight
        );
    }
}

fn verify(
    mode: &str,
    k: usize,
    t: Option<u64>,
    input: &Path,
    verbose: bool,
    json: bool,
    started: Instant,
) -> anyhow::Result<u8> {
    let seq = read_sequence(input)?;
    let scanner = ScannerRegistry::with_builtins().get(mode, &ScanOptions { t, verbose })?;
    let rep = scanner.scan(&seq, k)?;
    if json {
        let a = seq.alphabet();
        Report::new("verify", started)
            .param("mode", mode)
            .param("r", a.r())
            .param("s", a.s())
            .param("k", k)
            .param("t", t)
            .param("n", seq.len())
            .emit(&rep)?;
    } else {
        print_scan(&rep);
    }
    Ok(if rep.found { FOUND } else { OK })
}

fn print_threshold(res: &ThresholdResult) {
    println!(
        "derivedThreshold {} ({}), maxAvoidingN {}, cap {}",
        res.derived_threshold,
        res.label,
        res.max_avoiding_n.map_or("none".into(), |n| n.to_string()),
        res.search_cap
    );
    for w in &res.witnesses {
        println!("witness: {}", values_line(w));
    }
    for note in &res.notes {
        println!("note: {note}");
    }
}

#[allow(clippy::too_many_arguments)]
fn oracle(
    target: Target,
    letters: Letters,
    k: Option<u64>,
    q: u64,
    cap: Option<usize>,
    v: Option<u32>,
    factors: Option<Vec<u64>>,
    threads: Option<usize>,
    budget: Option<u128>,
    json: bool,
    started: Instant,
) -> anyhow::Result<u8> {
    let mut config = OracleConfig::from_env()?;
    config.threads = threads;
    if let Some(b) = budget {
        config.budget = b;
    }
    let need_k = || k.ok_or_else(|| Error::Precondition("--k is required".into()));
    let report = Report::new("oracle", started)
        .param(
            "target",
            target.to_possible_value().map(|p| p.get_name().to_owned()),
        )
        .param("k", k);
    match target {
        Target::BlockThreshold | Target::ApThreshold => {
            let k = need_k()?;
            let params = Params::new(letters.r, letters.s, k)?;
            let cap = cap.unwrap_or(3 * k as usize);
            let mode = if target == Target::BlockThreshold {
                SearchMode::Block
            } else {
                SearchMode::Ap
            };
            let res = exact_threshold(params, mode, q, cap, &config)?;
            if json {
                report
                    .param("r", letters.r)
                    .param("s", letters.s)
                    .param("q", q)
                    .param("cap", cap)
                    .emit(&res)?;
            } else {
                print_threshold(&res);
            }
            Ok(OK)
        }
        Target::TwoK => {
            let verdict = verify_2k_proposition(need_k()?, &config)?;
            if json {
                report.emit(&verdict)?;
            } else if verdict.verified {
                println!(
                    "verified: {} zero-sum sequences of length {}",
                    verdict.sequences_checked,
                    2 * verdict.k
                );
            } else if let Some(c) = &verdict.counterexample {
                println!("counterexample: {}", values_line(c));
            }
            Ok(if verdict.verified { OK } else { FOUND })
        }
        Target::Pow2 => {
            let v = v.ok_or_else(|| Error::Precondition("--v is required".into()))?;
            let verdict = verify_pow2_rigidity(v)?;
            if json {
                report.param("v", v).emit(&verdict)?;
            } else {
                println!(
                    "{}: {} of {} functions survive",
                    if verdict.verified {
                        "verified"
                    } else {
                        "failed"
                    },
                    verdict.survivors.len(),
                    verdict.functions_checked
                );
            }
            Ok(if verdict.verified { OK } else { FOUND })
        }
        Target::ResidueLemma => {
            let k = need_k()?;
            let factors = match factors {
                Some(f) => f,
                None if k % 4 == 2 => vec![k / 2],
                None => bail!(Error::Precondition("--factors is required".into())),
            };
            let verdict = verify_lemma_residue_properties(k, &factors)?;
            if json {
                report.param("factors", &factors).emit(&verdict)?;
            } else {
                println!(
                    "{}: {} progressions checked, {} entries equal +1",
                    if verdict.verified {
                        "verified"
                    } else {
                        "failed"
                    },
                    verdict.progressions_checked,
                    verdict.plus_count
                );
                if let Some((d, start)) = verdict.zero_progression {
                    println!("zero progression: difference {d} start {start}");
                }
            }
            Ok(if verdict.verified { OK } else { FOUND })
        }
    }
}

fn shift(
    letters: Letters,
    k: u64,
    max_alpha: Option<u64>,
    prime: bool,
    json: bool,
    started: Instant,
) -> anyhow::Result<u8> {
    let params = Params::new(letters.r, letters.s, k)?;
    let g: GoodShift = if prime {
        prime_shift(params)?
    } else {
        min_good_shift(params, max_alpha)?
    };
    if json {
        Report::new("shift", started)
            .param("r", letters.r)
            .param("s", letters.s)
            .param("k", k)
            .param("maxAlpha", max_alpha)
            .param("prime", prime)
            .emit(&g)?;
    } else {
        println!(
            "alpha = {} (k + alpha = {}, prime factors {:?})",
            g.alpha, g.a, g.prime_factors_of_a
        );
    }
    Ok(OK)
}

fn table(
    letters: Letters,
    k_min: u64,
    k_max: u64,
    what: What,
    alpha: Option<u64>,
    out: Option<&Path>,
) -> anyhow::Result<u8> {
    if k_min == 0 || k_min > k_max {
        bail!(Error::Precondition(format!(
            "need 1 <= k-min <= k-max (got {k_min}..{k_max})"
        )));
    }
    let m = letters.r + letters.s;
    let mut csv = String::from("k,value\n");
    for k in (k_min..=k_max).filter(|k| k % m == 0) {
        let params = Params::new(letters.r, letters.s, k)?;
        let value = match what {
            What::N => block_threshold(params)?.n_exact,
            What::Shift => min_good_shift(params, None)?.alpha,
            What::ApLb => {
                let a = match alpha {
                    Some(a) => a,
                    None => min_good_shift(params, None)?.alpha,
                };
                ap_lower_bound_value(params, a)?
            }
        };
        csv.push_str(&format!("{k},{value}\n"));
    }
    match out {
        Some(path) => {
            std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(OK)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let started = Instant::now();
    match cli.command {
        Command::Bound {
            letters,
            k,
            q,
            t,
            json,
        } => bound(letters, k, q, t, json, started),
        Command::Construct {
            kind,
            r,
            s,
            k,
            alpha,
            factors,
            p,
            out,
            encoding,
            json,
        } => {
            let request = ConstructionRequest {
                r,
                s,
                k,
                alpha,
                factors,
                p,
            };
            construct(&kind, request, &out, encoding, json, started)
        }
        Command::Verify {
            mode,
            k,
            t,
            input,
            verbose,
            json,
        } => verify(&mode, k, t, &input, verbose, json, started),
        Command::Oracle {
            target,
            letters,
            k,
            q,
            cap,
            v,
            factors,
            threads,
            budget,
            json,
        } => oracle(
            target, letters, k, q, cap, v, factors, threads, budget, json, started,
        ),
        Command::Shift {
            letters,
            k,
            max_alpha,
            prime,
            json,
        } => shift(letters, k, max_alpha, prime, json, started),
        Command::Table {
            letters,
            k_min,
            k_max,
            what,
            alpha,
            out,
        } => table(letters, k_min, k_max, what, alpha, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::SearchFailure { .. }) => ExitCode::from(FOUND),
                _ => ExitCode::from(2),
            }
        }
    }
}

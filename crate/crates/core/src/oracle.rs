//! Exhaustive ground truth for small parameters.
//!
//! Thresholds are found by a depth-first placement of letters that abandons a
//! branch as soon as a completed window (or progression) hits the target
//! pattern. The search is sharded over fixed leading-bit prefixes and run on
//! rayon; shard outputs are merged in prefix order, so the result does not
//! depend on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{binomial, divisors};
use crate::constructions::build_ap_mod_k_product;
use crate::error::{precondition, Error, Result};
use crate::formulas::pm1_smallsum_threshold;
use crate::params::{Alphabet, Params};
use crate::scanners::block_scan;
use crate::sequence::SignSeq;

/// Default ceiling on window evaluations per invocation.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// Environment variable that overrides [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "ZEROSUM_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SearchMode {
    Block,
    #[serde(rename = "AP")]
    Ap,
}

/// What a branch must avoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    ZeroBlock,
    ZeroAp,
    /// A k-block with `|weight| <= t`.
    SmallBlock {
        t: u64,
    },
}

impl Pattern {
    fn mode(&self) -> SearchMode {
        match self {
            Pattern::ZeroAp => SearchMode::Ap,
            _ => SearchMode::Block,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub budget: u128,
    /// Number of leading positions fixed per shard.
    pub shard_depth: usize,
    /// Witnesses kept at the largest avoiding length.
    pub witness_limit: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            threads: None,
            budget: DEFAULT_BUDGET,
            shard_depth: 8,
            witness_limit: 16,
        }
    }
}

impl OracleConfig {
    /// Defaults with the budget taken from `ZEROSUM_BUDGET` when it is set.
    pub fn from_env() -> Result<Self> {
        let mut config = Self::default();
        if let Ok(raw) = std::env::var(BUDGET_ENV) {
            config.budget = raw.trim().parse().map_err(|_| {
                Error::Precondition(format!(
                    "{BUDGET_ENV} must be a nonnegative integer (got {raw:?})"
                ))
            })?;
        }
        Ok(config)
    }

    fn run<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(job()),
            Some(threads) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads.max(1))
                    .build()
                    .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// Enumeration outcome at one length and letter split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LengthSummary {
    pub n: usize,
    pub negative_count: usize,
    pub candidates: u64,
    pub avoiding: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ThresholdResult {
    pub params: Params,
    pub mode: SearchMode,
    pub q: u64,
    pub max_avoiding_n: Option<usize>,
    pub derived_threshold: u64,
    pub witnesses: Vec<SignSeq>,
    pub search_cap: usize,
    pub exhaustive: bool,
    /// `"exact"` when the enumeration was exhaustive.
    pub label: String,
    pub per_length: Vec<LengthSummary>,
    pub window_evaluations: u64,
    pub notes: Vec<String>,
}

/// Letter splits `(negatives, positives)` of length `n` with `|weight| <= q`.
pub fn letter_counts(alphabet: Alphabet, n: usize, q: u64) -> Vec<(usize, usize)> {
    let (r, s) = (alphabet.r() as i128, alphabet.s() as i128);
    (0..=n)
        .filter(|&neg| {
            let w = s * (n - neg) as i128 - r * neg as i128;
            w.unsigned_abs() <= q as u128
        })
        .map(|neg| (neg, n - neg))
        .collect()
}

fn windows_per_candidate(pattern: Pattern, n: usize, k: usize) -> u128 {
    if n < k {
        return 0;
    }
    match pattern {
        Pattern::ZeroBlock | Pattern::SmallBlock { .. } => (n - k + 1) as u128,
        Pattern::ZeroAp => {
            if k <= 1 {
                return n as u128;
            }
            let max_d = (n - 1) / (k - 1);
            (1..=max_d).map(|d| (n - (k - 1) * d) as u128).sum()
        }
    }
}

/// Upper estimate of window evaluations for an unpruned search.
pub fn estimate_window_evaluations(
    params: Params,
    mode: SearchMode,
    q: u64,
    search_cap: usize,
) -> u128 {
    let pattern = match mode {
        SearchMode::Block => Pattern::ZeroBlock,
        SearchMode::Ap => Pattern::ZeroAp,
    };
    estimate(
        params.alphabet(),
        params.k() as usize,
        pattern,
        q,
        search_cap,
    )
}

fn estimate(alphabet: Alphabet, k: usize, pattern: Pattern, q: u64, cap: usize) -> u128 {
    (k..=cap)
        .map(|n| {
            let per = windows_per_candidate(pattern, n, k);
            letter_counts(alphabet, n, q)
                .into_iter()
                .map(|(neg, _)| {
                    binomial(n as u64, neg as u64)
                        .unwrap_or(u128::MAX)
                        .saturating_mul(per)
                })
                .fold(0u128, u128::saturating_add)
        })
        .fold(0u128, u128::saturating_add)
}

#[derive(Default)]
struct ShardOut {
    candidates: u64,
    avoiding: u64,
    witnesses: Vec<Vec<bool>>,
    evaluations: u64,
}

struct Search<'a> {
    n: usize,
    k: usize,
    neg_value: i64,
    pos_value: i64,
    pattern: Pattern,
    forced: &'a [bool],
    witness_limit: usize,
}

impl Search<'_> {
    /// Does the window or progression ending at `i` complete the pattern?
    fn hits(&self, i: usize, values: &[i64], prefix: &[i64], evals: &mut u64) -> bool {
        let k = self.k;
        if i + 1 < k {
            return false;
        }
        match self.pattern {
            Pattern::ZeroBlock => {
                *evals += 1;
                prefix[i + 1] == prefix[i + 1 - k]
            }
            Pattern::SmallBlock { t } => {
                *evals += 1;
                (prefix[i + 1] - prefix[i + 1 - k]).unsigned_abs() <= t
            }
            Pattern::ZeroAp => {
                if k == 1 {
                    *evals += 1;
                    return values[i] == 0;
                }
                let mut d = 1;
                while (k - 1) * d <= i {
                    *evals += 1;
                    let w: i64 = (0..k).map(|j| values[i - j * d]).sum();
                    if w == 0 {
                        return true;
                    }
                    d += 1;
                }
                false
            }
        }
    }

    /// Completions of a prefix of length `len` that respect the shard prefix.
    fn completions(&self, len: usize, neg_left: usize, pos_left: usize) -> u64 {
        let rest = self.forced.get(len..).unwrap_or(&[]);
        let forced_pos = rest.iter().filter(|&&b| b).count();
        let forced_neg = rest.len() - forced_pos;
        if forced_neg > neg_left || forced_pos > pos_left {
            return 0;
        }
        let free_neg = (neg_left - forced_neg) as u64;
        let free = free_neg + (pos_left - forced_pos) as u64;
        binomial(free, free_neg).unwrap() as u64
    }

    fn dfs(
        &self,
        neg_left: usize,
        pos_left: usize,
        bits: &mut Vec<bool>,
        values: &mut Vec<i64>,
        prefix: &mut Vec<i64>,
        out: &mut ShardOut,
    ) {
        let i = bits.len();
        if i == self.n {
            out.candidates += 1;
            out.avoiding += 1;
            if out.witnesses.len() < self.witness_limit {
                out.witnesses.push(bits.clone());
            }
            return;
        }
        for bit in [false, true] {
            if i < self.forced.len() && self.forced[i] != bit {
                continue;
            }
            let (nl, pl) = match bit {
                false if neg_left > 0 => (neg_left - 1, pos_left),
                true if pos_left > 0 => (neg_left, pos_left - 1),
                _ => continue,
            };
            let v = if bit { self.pos_value } else { self.neg_value };
            bits.push(bit);
            values.push(v);
            prefix.push(prefix[i] + v);
            if self.hits(i, values, prefix, &mut out.evaluations) {
                // every completion of this prefix inside the shard contains
                // the pattern
                out.candidates += self.completions(i + 1, nl, pl);
            } else {
                self.dfs(nl, pl, bits, values, prefix, out);
            }
            bits.pop();
            values.pop();
            prefix.pop();
        }
    }
}

fn shard_prefixes(depth: usize, neg: usize, pos: usize) -> Vec<Vec<bool>> {
    (0u64..1 << depth)
        .map(|mask| {
            (0..depth)
                .map(|j| mask >> (depth - 1 - j) & 1 == 1)
                .collect::<Vec<_>>()
        })
        .filter(|bits| {
            let ones = bits.iter().filter(|&&b| b).count();
            ones <= pos && depth - ones <= neg
        })
        .collect()
}

fn enumerate_split(
    alphabet: Alphabet,
    k: usize,
    pattern: Pattern,
    n: usize,
    neg: usize,
    config: &OracleConfig,
) -> ShardOut {
    let pos = n - neg;
    let depth = config.shard_depth.min(n).min(20);
    let shards = shard_prefixes(depth, neg, pos);
    let outs: Vec<ShardOut> = shards
        .par_iter()
        .map(|forced| {
            let search = Search {
                n,
                k,
                neg_value: alphabet.value(false),
                pos_value: alphabet.value(true),
                pattern,
                forced,
                witness_limit: config.witness_limit,
            };
            let mut out = ShardOut::default();
            let mut prefix = Vec::with_capacity(n + 1);
            prefix.push(0);
            search.dfs(
                neg,
                pos,
                &mut Vec::with_capacity(n),
                &mut Vec::with_capacity(n),
                &mut prefix,
                &mut out,
            );
            out
        })
        .collect();
    let mut merged = ShardOut::default();
    for out in outs {
        merged.candidates += out.candidates;
        merged.avoiding += out.avoiding;
        merged.evaluations += out.evaluations;
        merged.witnesses.extend(out.witnesses);
    }
    merged.witnesses.sort();
    merged.witnesses.truncate(config.witness_limit);
    merged
}

fn search_threshold(
    params: Params,
    pattern: Pattern,
    q: u64,
    search_cap: usize,
    config: &OracleConfig,
) -> Result<ThresholdResult> {
    let k = params.k() as usize;
    let alphabet = params.alphabet();
    if search_cap > 63 {
        return precondition(format!("search cap {search_cap} exceeds 63"));
    }
    let estimate = estimate(alphabet, k, pattern, q, search_cap);
    if estimate > config.budget {
        return Err(Error::Budget {
            estimate,
            ceiling: config.budget,
        });
    }

    let mut per_length = Vec::new();
    let mut max_avoiding_n = None;
    let mut witnesses: Vec<Vec<bool>> = Vec::new();
    let mut evaluations = 0u64;
    config.run(|| {
        for n in k..=search_cap {
            let splits = letter_counts(alphabet, n, q);
            let mut found_here = Vec::new();
            for &(neg, _) in &splits {
                let out = enumerate_split(alphabet, k, pattern, n, neg, config);
                evaluations += out.evaluations;
                per_length.push(LengthSummary {
                    n,
                    negative_count: neg,
                    candidates: out.candidates,
                    avoiding: out.avoiding,
                });
                found_here.extend(out.witnesses);
            }
            if !found_here.is_empty() {
                found_here.sort();
                found_here.truncate(config.witness_limit);
                max_avoiding_n = Some(n);
                witnesses = found_here;
            }
        }
    })?;

    let derived_threshold = match max_avoiding_n {
        Some(n) => (k as u64).max(n as u64 + 1),
        None => k as u64,
    };
    let mut notes = Vec::new();
    if per_length.is_empty() {
        notes.push(format!("no admissible length in [{k}, {search_cap}]"));
    }
    if pattern.mode() == SearchMode::Ap {
        notes.push("no closed form for the progression threshold; empirical data point".into());
    }
    if let Pattern::SmallBlock { t } = pattern {
        notes.push(format!("target: k-block with |weight| <= {t}"));
    }
    notes.push("threshold taken over admissible lengths only".into());
    Ok(ThresholdResult {
        params,
        mode: pattern.mode(),
        q,
        max_avoiding_n,
        derived_threshold,
        witnesses: witnesses
            .into_iter()
            .map(|bits| SignSeq::from_bits(alphabet, bits))
            .collect(),
        search_cap,
        exhaustive: true,
        label: "exact".into(),
        per_length,
        window_evaluations: evaluations,
        notes,
    })
}

/// Exact threshold by exhaustive search over every admissible length in
/// `[k, search_cap]`.
pub fn exact_threshold(
    params: Params,
    mode: SearchMode,
    q: u64,
    search_cap: usize,
    config: &OracleConfig,
) -> Result<ThresholdResult> {
    let pattern = match mode {
        SearchMode::Block => Pattern::ZeroBlock,
        SearchMode::Ap => Pattern::ZeroAp,
    };
    search_threshold(params, pattern, q, search_cap, config)
}

/// Subsets of `{0, .., n-1}` of size `k` as bitmasks, in increasing order.
pub struct Combinations {
    n: u32,
    next: Option<u64>,
}

impl Combinations {
    pub fn new(n: u32, k: u32) -> Self {
        assert!(n < 64);
        let next = (k <= n).then(|| if k == 0 { 0 } else { (1u64 << k) - 1 });
        Combinations { n, next }
    }
}

impl Iterator for Combinations {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (nxt >> self.n == 0).then_some(nxt)
        };
        Some(cur)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoKVerdict {
    pub k: u64,
    pub sequences_checked: u64,
    pub verified: bool,
    pub counterexample: Option<SignSeq>,
}

/// Every zero-sum `{-1, 1}`-sequence of length `2k` has a zero-sum k-block.
pub fn verify_2k_proposition(k: u64, config: &OracleConfig) -> Result<TwoKVerdict> {
    if k == 0 || !k.is_multiple_of(2) || k > 12 {
        return precondition(format!("k must be even with 2 <= k <= 12 (got {k})"));
    }
    let n = 2 * k;
    let estimate = binomial(n, k).unwrap() * (k as u128 + 1);
    if estimate > config.budget {
        return Err(Error::Budget {
            estimate,
            ceiling: config.budget,
        });
    }
    let masks: Vec<u64> = Combinations::new(n as u32, k as u32).collect();
    let failures = config.run(|| {
        masks
            .par_iter()
            .filter_map(|&mask| {
                let seq = SignSeq::from_mask(Alphabet::PM1, mask, n as usize);
                let report = block_scan(&seq, k as usize).expect("k <= n");
                (!report.found).then_some(seq)
            })
            .min()
    })?;
    Ok(TwoKVerdict {
        k,
        sequences_checked: masks.len() as u64,
        verified: failures.is_none(),
        counterexample: failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Pow2Verdict {
    pub v: u32,
    pub functions_checked: u64,
    /// Surviving functions as bitmasks, bit `j` set when `f(j) = 1`.
    pub survivors: Vec<u64>,
    pub verified: bool,
}

/// Does `f` (bit `j` of `mask` set iff `f(j) = 1`) have nonzero weight on
/// every dyadic progression `{j, j + 2^w, ...}` of `Z/2^v`, `0 <= w < v`?
fn dyadic_progressions_nonzero(mask: u64, v: u32) -> bool {
    let m = 1u64 << v;
    (0..v).all(|w| {
        let step = 1u64 << w;
        (0..step).all(|start| {
            let weight: i64 = (start..m)
                .step_by(step as usize)
                .map(|j| if mask >> j & 1 == 1 { 1 } else { -1 })
                .sum();
            weight != 0
        })
    })
}

/// Over `Z/2^v`, only the two constant functions avoid zero-sum dyadic
/// progressions.
pub fn verify_pow2_rigidity(v: u32) -> Result<Pow2Verdict> {
    if !(2..=4).contains(&v) {
        return precondition(format!("v must be in 2..=4 (got {v})"));
    }
    let total = 1u64 << (1u64 << v);
    let survivors: Vec<u64> = (0..total)
        .filter(|&mask| dyadic_progressions_nonzero(mask, v))
        .collect();
    let verified = survivors == [0, total - 1];
    Ok(Pow2Verdict {
        v,
        functions_checked: total,
        survivors,
        verified,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidueLemmaVerdict {
    pub k: u64,
    pub factors: Vec<u64>,
    pub plus_count: u64,
    pub progressions_checked: u64,
    /// First `(difference, start)` with zero weight, if any.
    pub zero_progression: Option<(u64, u64)>,
    pub verified: bool,
}

/// Checks the product residue function: `k/2 + 1` entries equal `+1`, and
/// every full progression over `Z/k` with difference `d | k` is nonzero.
pub fn verify_lemma_residue_properties(k: u64, factors: &[u64]) -> Result<ResidueLemmaVerdict> {
    if k > 2310 {
        return precondition(format!("k must be at most 2310 (got {k})"));
    }
    let f = build_ap_mod_k_product(k, factors)?;
    let table: Vec<i64> = f.table.values().collect();
    let plus_count = table.iter().filter(|&&x| x == 1).count() as u64;
    let mut checked = 0u64;
    let mut zero_progression = None;
    'outer: for d in divisors(k) {
        for start in 0..d {
            checked += 1;
            let w: i64 = (start..k)
                .step_by(d as usize)
                .map(|j| table[j as usize])
                .sum();
            if w == 0 {
                zero_progression = Some((d, start));
                break 'outer;
            }
        }
    }
    Ok(ResidueLemmaVerdict {
        k,
        factors: factors.to_vec(),
        plus_count,
        progressions_checked: checked,
        verified: zero_progression.is_none() && plus_count == k / 2 + 1,
        zero_progression,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SmallSumCheck {
    pub k: u64,
    pub t: u64,
    pub q: u64,
    pub formula: u64,
    pub result: ThresholdResult,
    pub agrees: bool,
}

/// Compares the `{-1, 1}` small-sum threshold formula with exhaustive search.
pub fn verify_smallsum_theorem(
    k: u64,
    t: u64,
    q: u64,
    search_cap: usize,
    config: &OracleConfig,
) -> Result<SmallSumCheck> {
    let formula = pm1_smallsum_threshold(k, t, q)?;
    let params = Params::new(1, 1, k)?;
    let result = search_threshold(params, Pattern::SmallBlock { t }, q, search_cap, config)?;
    Ok(SmallSumCheck {
        k,
        t,
        q,
        formula,
        agrees: result.derived_threshold == formula,
        result,
    })
}

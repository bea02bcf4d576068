//! Detectors for zero-sum k-blocks, zero-sum k-term arithmetic progressions
//! and small-sum blocks.
//!
//! Every scanner sits behind the [`Scanner`] trait and is registered by name
//! in a [`ScannerRegistry`], so callers pick one at runtime. Witness order is
//! deterministic: blocks by lowest start, progressions by lowest difference
//! and then lowest start. All positions are 0-based.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::sequence::SignSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ScanMode {
    Block,
    #[serde(rename = "AP")]
    Ap,
    SmallSum,
}

impl ScanMode {
    pub fn name(&self) -> &'static str {
        match self {
            ScanMode::Block => "block",
            ScanMode::Ap => "ap",
            ScanMode::SmallSum => "smallsum",
        }
    }
}

/// A scanned window: `start, start + difference, ..., start + (k-1) difference`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub start: usize,
    pub difference: usize,
}

/// Minimum absolute weight over the progressions with one common difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DifferenceSummary {
    pub difference: usize,
    pub min_abs_weight: i64,
    pub scanned_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanReport {
    pub mode: ScanMode,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    pub found: bool,
    pub witness: Option<Witness>,
    pub min_abs_weight: i64,
    pub scanned_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_difference: Option<Vec<DifferenceSummary>>,
}

fn check_k(seq: &SignSeq, k: usize) -> Result<()> {
    if k == 0 {
        return precondition("k must be positive");
    }
    if k > seq.len() {
        return precondition(format!("k = {k} exceeds sequence length {}", seq.len()));
    }
    Ok(())
}

/// Scan every contiguous k-window for weight 0.
pub fn block_scan(seq: &SignSeq, k: usize) -> Result<ScanReport> {
    threshold_block_scan(seq, k, 0, ScanMode::Block)
}

fn threshold_block_scan(seq: &SignSeq, k: usize, t: u64, mode: ScanMode) -> Result<ScanReport> {
    check_k(seq, k)?;
    let prefix = seq.prefix_weights();
    let windows = seq.len() - k + 1;
    let mut witness = None;
    let mut min_abs = i64::MAX;
    for start in 0..windows {
        let w = (prefix[start + k] - prefix[start]).abs();
        min_abs = min_abs.min(w);
        if witness.is_none() && w as u64 <= t {
            witness = Some(Witness {
                start,
                difference: 1,
            });
        }
    }
    Ok(ScanReport {
        mode,
        k,
        t: (mode == ScanMode::SmallSum).then_some(t),
        found: witness.is_some(),
        witness,
        min_abs_weight: min_abs,
        scanned_count: windows as u64,
        per_difference: None,
    })
}

/// Largest common difference a k-term progression inside `[0, n)` can have.
pub fn max_difference(n: usize, k: usize) -> usize {
    if k <= 1 {
        usize::from(n > 0)
    } else {
        n.saturating_sub(1) / (k - 1)
    }
}

/// Scan every k-term progression `(start, d)` with `start + (k-1) d < n`.
///
/// For each `d` the residue classes mod `d` are swept with a sliding window,
/// so the total cost is `O(n * max_d)`.
pub fn ap_scan(seq: &SignSeq, k: usize) -> Result<ScanReport> {
    ap_scan_inner(seq, k, false)
}

/// [`ap_scan`] that also reports the minimum absolute weight per difference.
pub fn ap_scan_verbose(seq: &SignSeq, k: usize) -> Result<ScanReport> {
    ap_scan_inner(seq, k, true)
}

fn ap_scan_inner(seq: &SignSeq, k: usize, verbose: bool) -> Result<ScanReport> {
    check_k(seq, k)?;
    let n = seq.len();
    let values = seq.to_vec();
    let max_d = max_difference(n, k);
    let mut witness: Option<Witness> = None;
    let mut min_abs = i64::MAX;
    let mut scanned = 0u64;
    let mut per_difference = Vec::new();

    for d in 1..=max_d {
        let mut d_min = i64::MAX;
        let mut d_count = 0u64;
        let mut d_first_zero: Option<usize> = None;
        for class in 0..d.min(n) {
            let terms = (n - 1 - class) / d + 1;
            if terms < k {
                continue;
            }
            let mut w: i64 = (0..k).map(|j| values[class + j * d]).sum();
            for j in 0..=terms - k {
                if j > 0 {
                    w += values[class + (j + k - 1) * d] - values[class + (j - 1) * d];
                }
                d_min = d_min.min(w.abs());
                d_count += 1;
                if w == 0 {
                    let start = class + j * d;
                    if d_first_zero.is_none_or(|s| start < s) {
                        d_first_zero = Some(start);
                    }
                }
            }
        }
        min_abs = min_abs.min(d_min);
        scanned += d_count;
        if witness.is_none() {
            witness = d_first_zero.map(|start| Witness {
                start,
                difference: d,
            });
        }
        if verbose {
            per_difference.push(DifferenceSummary {
                difference: d,
                min_abs_weight: d_min,
                scanned_count: d_count,
            });
        }
    }

    Ok(ScanReport {
        mode: ScanMode::Ap,
        k,
        t: None,
        found: witness.is_some(),
        witness,
        min_abs_weight: min_abs,
        scanned_count: scanned,
        per_difference: verbose.then_some(per_difference),
    })
}

/// First k-block of absolute weight at most `t` in a `{-1, 1}`-sequence.
pub fn smallsum_block_scan(seq: &SignSeq, k: usize, t: u64) -> Result<ScanReport> {
    if !seq.alphabet().is_pm1() {
        return precondition("small-sum scan needs a {-1, 1}-sequence");
    }
    if t as usize >= k {
        return precondition(format!("need t < k (got t={t}, k={k})"));
    }
    if !(k as u64 - t).is_multiple_of(2) {
        return precondition(format!("t must have the parity of k (got t={t}, k={k})"));
    }
    threshold_block_scan(seq, k, t, ScanMode::SmallSum)
}

/// Outcome of checking the interpolation property on one sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InterpolationVerdict {
    pub holds: bool,
    pub window_count: usize,
    pub has_negative: bool,
    pub has_positive: bool,
    pub has_zero: bool,
    pub max_adjacent_step: i64,
    pub step_bound_holds: bool,
    pub residues_hold: bool,
}

/// Checks, over all k-windows: a negative and a positive window force a
/// zero window; adjacent windows differ by at most `r + s`; every window
/// weight is `0 (mod r + s)`.
pub fn interpolation_check(seq: &SignSeq, k: usize) -> Result<InterpolationVerdict> {
    check_k(seq, k)?;
    let m = seq.alphabet().modulus() as i64;
    if k as i64 % m != 0 {
        return precondition(format!("r + s = {m} must divide k = {k}"));
    }
    let prefix = seq.prefix_weights();
    let weights: Vec<i64> = (0..=seq.len() - k)
        .map(|i| prefix[i + k] - prefix[i])
        .collect();
    let has_negative = weights.iter().any(|&w| w < 0);
    let has_positive = weights.iter().any(|&w| w > 0);
    let has_zero = weights.contains(&0);
    let max_adjacent_step = weights
        .windows(2)
        .map(|p| (p[1] - p[0]).abs())
        .max()
        .unwrap_or(0);
    let step_bound_holds = max_adjacent_step <= m;
    let residues_hold = weights.iter().all(|w| w % m == 0);
    let sign_change_ok = !(has_negative && has_positive) || has_zero;
    Ok(InterpolationVerdict {
        holds: sign_change_ok && step_bound_holds && residues_hold,
        window_count: weights.len(),
        has_negative,
        has_positive,
        has_zero,
        max_adjacent_step,
        step_bound_holds,
        residues_hold,
    })
}

/// A named detector for one pattern family.
pub trait Scanner: Send + Sync {
    fn mode(&self) -> ScanMode;
    fn scan(&self, seq: &SignSeq, k: usize) -> Result<ScanReport>;
}

pub struct BlockScanner;

impl Scanner for BlockScanner {
    fn mode(&self) -> ScanMode {
        ScanMode::Block
    }

    fn scan(&self, seq: &SignSeq, k: usize) -> Result<ScanReport> {
        block_scan(seq, k)
    }
}

pub struct ApScanner {
    pub verbose: bool,
}

impl Scanner for ApScanner {
    fn mode(&self) -> ScanMode {
        ScanMode::Ap
    }

    fn scan(&self, seq: &SignSeq, k: usize) -> Result<ScanReport> {
        ap_scan_inner(seq, k, self.verbose)
    }
}

pub struct SmallSumScanner {
    pub t: u64,
}

impl Scanner for SmallSumScanner {
    fn mode(&self) -> ScanMode {
        ScanMode::SmallSum
    }

    fn scan(&self, seq: &SignSeq, k: usize) -> Result<ScanReport> {
        smallsum_block_scan(seq, k, self.t)
    }
}

/// Options a scanner factory may read.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScanOptions {
    pub t: Option<u64>,
    pub verbose: bool,
}

type ScannerFactory = fn(&ScanOptions) -> Result<Box<dyn Scanner>>;

/// Scanners registered by name (`block`, `ap`, `smallsum`).
pub struct ScannerRegistry {
    factories: BTreeMap<&'static str, ScannerFactory>,
}

impl ScannerRegistry {
    pub fn empty() -> Self {
        ScannerRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("block", |_| Ok(Box::new(BlockScanner)));
        reg.register("ap", |o| Ok(Box::new(ApScanner { verbose: o.verbose })));
        reg.register("smallsum", |o| match o.t {
            Some(t) => Ok(Box::new(SmallSumScanner { t })),
            None => precondition("smallsum scanning needs t"),
        });
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: ScannerFactory) {
        self.factories.insert(name, factory);
    }

    pub fn get(&self, name: &str, options: &ScanOptions) -> Result<Box<dyn Scanner>> {
        match self.factories.get(name) {
            Some(f) => f(options),
            None => precondition(format!(
                "unknown scan mode {name:?}; known: {}",
                self.names().join(", ")
            )),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }
}

impl Default for ScannerRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Alphabet;
    use proptest::prelude::*;

    fn pm1(values: &[i64]) -> SignSeq {
        SignSeq::from_values(Alphabet::PM1, values).unwrap()
    }

    #[test]
    fn alternating_pair_is_found_at_zero() {
        let r = block_scan(&pm1(&[1, -1, 1, -1]), 2).unwrap();
        assert!(r.found);
        assert_eq!(
            r.witness,
            Some(Witness {
                start: 0,
                difference: 1
            })
        );
        assert_eq!(r.min_abs_weight, 0);
        assert_eq!(r.scanned_count, 3);
    }

    #[test]
    fn extremal_one_two_six_windows_all_weigh_three() {
        let a = Alphabet::new(1, 2).unwrap();
        let seq = SignSeq::from_values(a, &[-1, -1, -1, 2, 2, 2, -1, -1, -1]).unwrap();
        let r = block_scan(&seq, 6).unwrap();
        assert!(!r.found);
        assert_eq!(r.min_abs_weight, 3);
    }

    #[test]
    fn k_larger_than_n_is_rejected() {
        assert!(block_scan(&pm1(&[1, -1]), 3).is_err());
        assert!(ap_scan(&pm1(&[1, -1]), 3).is_err());
    }

    #[test]
    fn ap_scan_finds_alternating_block() {
        let seq = pm1(&[1, -1, 1, -1, 1, -1, 1, -1]);
        let r = ap_scan(&seq, 4).unwrap();
        assert_eq!(
            r.witness,
            Some(Witness {
                start: 0,
                difference: 1
            })
        );
    }

    #[test]
    fn ap_scan_counts_progressions() {
        let seq = pm1(&[1; 10]);
        // d=1: 7, d=2: 4, d=3: 1
        let r = ap_scan_verbose(&seq, 4).unwrap();
        assert_eq!(r.scanned_count, 12);
        assert_eq!(r.per_difference.unwrap().len(), 3);
        assert_eq!(r.min_abs_weight, 4);
    }

    #[test]
    fn ap_witness_prefers_small_difference_then_start() {
        // d=1 has no zero window; d=2 has zero windows at starts 1 and 0.
        let seq = pm1(&[1, 1, -1, 1, 1, 1, -1, 1]);
        let naive = naive_first(&seq, 2);
        let r = ap_scan(&seq, 2).unwrap();
        assert_eq!(r.witness, naive);
    }

    #[test]
    fn smallsum_examples() {
        let seq = pm1(&[1; 9]);
        let r = smallsum_block_scan(&seq, 4, 2).unwrap();
        assert!(!r.found);
        assert_eq!(r.min_abs_weight, 4);
        let alt = pm1(&[1, 1, -1, 1, -1, -1]);
        assert_eq!(
            smallsum_block_scan(&alt, 4, 0).unwrap().found,
            block_scan(&alt, 4).unwrap().found
        );
        assert!(smallsum_block_scan(&seq, 4, 1).is_err());
        let a = Alphabet::new(1, 2).unwrap();
        assert!(
            smallsum_block_scan(&SignSeq::from_values(a, &[-1, 2, -1]).unwrap(), 2, 0).is_err()
        );
    }

    #[test]
    fn interpolation_example() {
        let a = Alphabet::new(1, 2).unwrap();
        let seq = SignSeq::from_values(a, &[-1, -1, 2, 2, -1, -1]).unwrap();
        let v = interpolation_check(&seq, 3).unwrap();
        assert!(v.holds);
        assert!(v.has_zero && v.has_positive && !v.has_negative);
        assert_eq!(v.window_count, 4);
    }

    #[test]
    fn registry_lookup() {
        let reg = ScannerRegistry::with_builtins();
        assert_eq!(reg.names(), vec!["ap", "block", "smallsum"]);
        let s = reg.get("ap", &ScanOptions::default()).unwrap();
        assert_eq!(s.mode(), ScanMode::Ap);
        assert!(reg.get("smallsum", &ScanOptions::default()).is_err());
        assert!(reg.get("nope", &ScanOptions::default()).is_err());
    }

    /// Naive `O(#APs * k)` rescan used as an oracle.
    fn naive_first(seq: &SignSeq, k: usize) -> Option<Witness> {
        let n = seq.len();
        for d in 1..=max_difference(n, k) {
            for start in 0..n {
                if start + (k - 1) * d >= n {
                    break;
                }
                let w: i64 = (0..k).map(|j| seq.value(start + j * d)).sum();
                if w == 0 {
                    return Some(Witness {
                        start,
                        difference: d,
                    });
                }
            }
        }
        None
    }

    fn naive_min(seq: &SignSeq, k: usize) -> i64 {
        let n = seq.len();
        let mut best = i64::MAX;
        for d in 1..=max_difference(n, k) {
            for start in 0..n {
                if start + (k - 1) * d >= n {
                    break;
                }
                let w: i64 = (0..k).map(|j| seq.value(start + j * d)).sum();
                best = best.min(w.abs());
            }
        }
        best
    }

    proptest! {
        #[test]
        fn ap_scan_agrees_with_naive(
            (r, s) in prop::sample::select(vec![(1u64, 1u64), (1, 2), (2, 3)]),
            bits in prop::collection::vec(any::<bool>(), 1..80),
            k in 1usize..12,
        ) {
            let a = Alphabet::new(r, s).unwrap();
            let seq = SignSeq::from_bits(a, bits);
            prop_assume!(k <= seq.len());
            let rep = ap_scan(&seq, k).unwrap();
            prop_assert_eq!(rep.witness, naive_first(&seq, k));
            prop_assert_eq!(rep.min_abs_weight, naive_min(&seq, k));
            let block = block_scan(&seq, k).unwrap();
            prop_assert_eq!(block.found, rep.witness.is_some_and(|w| w.difference == 1));
            if (k as u64).is_multiple_of(a.modulus()) {
                prop_assert!(interpolation_check(&seq, k).unwrap().holds);
            }
        }
    }
}

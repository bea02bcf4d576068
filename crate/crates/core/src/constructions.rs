//! Explicit extremal sequences.
//!
//! Each family implements [`ConstructionStrategy`] and is registered by its
//! CLI name in [`ConstructionRegistry`]. Every sequence construction is
//! zero-sum; the residue table of the product construction is the one
//! exception (its total is `+2`) and is flagged by its claimed property.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{precondition, Error, Result};
use crate::formulas::shift_parameter;
use crate::good_shift::{is_good_shift, min_good_shift};
use crate::params::{Alphabet, Params};
use crate::sequence::SignSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstructionKind {
    BlockExtremal,
    BlockExtremalNegated,
    ApModK,
    ApModKProduct,
    ApModKPlus1,
    ApGoodShift,
    ApTwoP,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 7] = [
        ConstructionKind::BlockExtremal,
        ConstructionKind::BlockExtremalNegated,
        ConstructionKind::ApModK,
        ConstructionKind::ApModKProduct,
        ConstructionKind::ApModKPlus1,
        ConstructionKind::ApGoodShift,
        ConstructionKind::ApTwoP,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConstructionKind::BlockExtremal => "block-extremal",
            ConstructionKind::BlockExtremalNegated => "block-extremal-neg",
            ConstructionKind::ApModK => "ap-mod-k",
            ConstructionKind::ApModKProduct => "ap-product",
            ConstructionKind::ApModKPlus1 => "ap-mod-k1",
            ConstructionKind::ApGoodShift => "ap-good-shift",
            ConstructionKind::ApTwoP => "ap-two-p",
        }
    }
}

/// What a construction avoids, in a form the scanners can check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "property", rename_all = "camelCase")]
pub enum ClaimedProperty {
    /// No zero-sum k-block; when `window_weight` is set every k-window has
    /// exactly that weight.
    #[serde(rename_all = "camelCase")]
    NoZeroSumBlock { k: u64, window_weight: Option<i64> },
    /// No zero-sum k-term progression; with `gcd_bound` every k-term
    /// progression of difference `d` has `|weight| >= gcd(d, k)`.
    #[serde(rename_all = "camelCase")]
    NoZeroSumAp { k: u64, gcd_bound: bool },
    /// Residue table over `Z/k`: every full progression `{j, j+d, ...}` with
    /// `d | k` has nonzero weight, and `k/2 + 1` entries are `+1`.
    NonzeroResidueProgressions { k: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub kind: ConstructionKind,
    pub params: Params,
    pub length: usize,
    pub seq: SignSeq,
    #[serde(rename = "claimedProperty")]
    pub claimed: ClaimedProperty,
    /// The length formula evaluated to 0 at this size.
    pub degenerate: bool,
    pub notes: Vec<String>,
}

impl Construction {
    fn new(
        kind: ConstructionKind,
        params: Params,
        seq: SignSeq,
        claimed: ClaimedProperty,
        notes: Vec<String>,
    ) -> Self {
        if !matches!(claimed, ClaimedProperty::NonzeroResidueProgressions { .. }) {
            assert_eq!(
                seq.total_weight().0,
                0,
                "{} construction must be zero-sum",
                kind.name()
            );
        }
        Construction {
            kind,
            params,
            length: seq.len(),
            degenerate: seq.is_empty(),
            seq,
            claimed,
            notes,
        }
    }
}

fn periodic(alphabet: Alphabet, n: u64, period: u64, neg_run: u64) -> SignSeq {
    SignSeq::from_bits(alphabet, (0..n).map(|j| j % period >= neg_run))
}

/// Layout of the block-extremal sequence: `blocks` copies of
/// `[-r; neg_run] [+s; pos_run]`, then `tail_neg` copies of `-r` and
/// `tail_pos` copies of `+s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub t: u64,
    pub blocks: u64,
    pub neg_run: u64,
    pub pos_run: u64,
    pub tail_neg: u64,
    pub tail_pos: u64,
}

impl BlockLayout {
    pub fn length(&self) -> u64 {
        self.blocks * (self.neg_run + self.pos_run) + self.tail_neg + self.tail_pos
    }
}

/// Block layout for `params`, or the quantity that makes it infeasible.
pub fn block_layout(params: Params) -> Result<BlockLayout> {
    params.require_divisible()?;
    let (r, s) = (params.r() as i128, params.s() as i128);
    let m = r + s;
    let neg_k = params.neg_per_k() as i128;
    let pos_k = params.pos_per_k() as i128;
    let t = shift_parameter(neg_k as u64, m as u64) as i128;
    // b = r s k/(r+s)^2 - (r + s t)/(r+s) or - (r + r(r+s-t))/(r+s); the
    // choice of t makes both numerators divisible by r + s.
    let (b_num, tail_neg, tail_pos) = if t <= r {
        (r * neg_k - r - s * t, neg_k - 1, t)
    } else {
        (r * neg_k - r - r * (m - t), neg_k - 1 - (m - t), 0)
    };
    if b_num.rem_euclid(m) != 0 {
        return Err(Error::FormulaDomain(format!(
            "block count numerator {b_num} is not divisible by {m}"
        )));
    }
    let blocks = b_num / m;
    if blocks < 0 {
        return Err(Error::Infeasible(format!(
            "block count b = {blocks} is negative for {params}"
        )));
    }
    if tail_neg < 0 {
        return Err(Error::Infeasible(format!(
            "remainder length {tail_neg} is negative for {params}"
        )));
    }
    Ok(BlockLayout {
        t: t as u64,
        blocks: blocks as u64,
        neg_run: (neg_k - 1) as u64,
        pos_run: (pos_k + 1) as u64,
        tail_neg: tail_neg as u64,
        tail_pos: tail_pos as u64,
    })
}

fn layout_bits(layout: &BlockLayout) -> Vec<bool> {
    let mut bits = Vec::with_capacity(layout.length() as usize);
    for _ in 0..layout.blocks {
        bits.extend(std::iter::repeat_n(false, layout.neg_run as usize));
        bits.extend(std::iter::repeat_n(true, layout.pos_run as usize));
    }
    bits.extend(std::iter::repeat_n(false, layout.tail_neg as usize));
    bits.extend(std::iter::repeat_n(true, layout.tail_pos as usize));
    bits
}

/// Zero-sum `{-r, s}`-sequence with every k-window of weight exactly `r + s`.
pub fn build_block_extremal(params: Params) -> Result<Construction> {
    let layout = block_layout(params)?;
    let seq = SignSeq::from_bits(params.alphabet(), layout_bits(&layout));
    Ok(Construction::new(
        ConstructionKind::BlockExtremal,
        params,
        seq,
        ClaimedProperty::NoZeroSumBlock {
            k: params.k(),
            window_weight: Some(params.modulus() as i64),
        },
        vec![format!("t = {}, b = {}", layout.t, layout.blocks)],
    ))
}

/// The block-extremal sequence for `(s, r, k)`, negated term by term so it
/// lives over `{-r, s}`; every k-window weighs `-(r + s)`.
pub fn build_block_extremal_negated(params: Params) -> Result<Construction> {
    let layout = block_layout(params.swapped())?;
    let inner = SignSeq::from_bits(params.alphabet().negated(), layout_bits(&layout));
    let seq = inner.negated();
    debug_assert_eq!(seq.alphabet(), params.alphabet());
    Ok(Construction::new(
        ConstructionKind::BlockExtremalNegated,
        params,
        seq,
        ClaimedProperty::NoZeroSumBlock {
            k: params.k(),
            window_weight: Some(-(params.modulus() as i64)),
        },
        vec![format!("t' = {}, b = {}", layout.t, layout.blocks)],
    ))
}

/// Period-`k/2` construction for `k == 2 (mod 4)`:
/// `f(j) = -1` iff `j mod a < (a-1)/2`, length `(2a+2) floor((a-1)/4)`.
pub fn build_ap_mod_k(k: u64) -> Result<Construction> {
    if k % 4 != 2 {
        return precondition(format!("need k == 2 (mod 4) (got k={k})"));
    }
    let a = k / 2;
    let n = (2 * a + 2) * ((a - 1) / 4);
    let seq = periodic(Alphabet::PM1, n, a, (a - 1) / 2);
    let params = Params::new(1, 1, k)?;
    Ok(Construction::new(
        ConstructionKind::ApModK,
        params,
        seq,
        ClaimedProperty::NoZeroSumAp { k, gcd_bound: true },
        vec![],
    ))
}

/// Product residue function over `Z/k` for `k = 2 a_1 ... a_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueFunction {
    pub modulus: u64,
    pub factors: Vec<u64>,
    pub table: SignSeq,
}

impl ResidueFunction {
    pub fn value(&self, j: u64) -> i64 {
        self.table.value((j % self.modulus) as usize)
    }

    pub fn plus_count(&self) -> usize {
        self.table.count_positive()
    }

    pub fn minus_count(&self) -> usize {
        self.table.count_negative()
    }

    /// Weight of `{start, start + d, ..., start + (k/d - 1) d}` over `Z/k`.
    pub fn progression_weight(&self, start: u64, d: u64) -> i64 {
        (0..self.modulus / d)
            .map(|i| self.value(start + i * d))
            .sum()
    }
}

fn validate_factors(k: u64, factors: &[u64]) -> Result<()> {
    if factors.is_empty() {
        return precondition("at least one factor is required");
    }
    for (i, &a) in factors.iter().enumerate() {
        if a < 3 || a % 2 == 0 {
            return precondition(format!("factor {a} must be odd and greater than 1"));
        }
        for &b in &factors[..i] {
            if a.gcd(&b) != 1 {
                return precondition(format!("factors {b} and {a} are not coprime"));
            }
        }
    }
    let product = factors
        .iter()
        .try_fold(2u64, |acc, &a| acc.checked_mul(a))
        .ok_or(Error::Overflow("factor product"))?;
    if product != k {
        return precondition(format!(
            "2 * product of factors = {product} differs from k = {k}"
        ));
    }
    Ok(())
}

/// `f(j) = prod_i r_i(j)` with `r_i(j) = -1` iff `j mod a_i < (a_i - 1)/2`.
pub fn build_ap_mod_k_product(k: u64, factors: &[u64]) -> Result<ResidueFunction> {
    validate_factors(k, factors)?;
    let table = SignSeq::from_bits(
        Alphabet::PM1,
        (0..k).map(|j| {
            let negatives = factors.iter().filter(|&&a| j % a < (a - 1) / 2).count();
            negatives % 2 == 0
        }),
    );
    Ok(ResidueFunction {
        modulus: k,
        factors: factors.to_vec(),
        table,
    })
}

/// Period-`(k+1)` construction for even `k`:
/// `f(j) = -1` iff `j mod a < (a-3)/2`, length `(a+3) floor((a-3)/6)`.
pub fn build_ap_mod_k_plus1(k: u64) -> Result<Construction> {
    if k < 2 || !k.is_multiple_of(2) {
        return precondition(format!("k must be even and at least 2 (got {k})"));
    }
    let a = k + 1;
    let n = (a + 3) * ((a - 3) / 6);
    let seq = periodic(Alphabet::PM1, n, a, (a - 3) / 2);
    Ok(Construction::new(
        ConstructionKind::ApModKPlus1,
        Params::new(1, 1, k)?,
        seq,
        ClaimedProperty::NoZeroSumAp {
            k,
            gcd_bound: false,
        },
        vec!["length uses floor((a-3)/6), i.e. (k+4) floor((k-2)/6)".into()],
    ))
}

/// Period-`(k + alpha)` construction for a good shift `alpha`.
pub fn build_ap_good_shift(params: Params, alpha: u64) -> Result<Construction> {
    params.require_divisible()?;
    let shift = is_good_shift(params, alpha);
    if !shift.good {
        return precondition(format!("alpha = {alpha} is not a good shift for {params}"));
    }
    let (r, s, k) = (params.r(), params.s(), params.k());
    let a = k + alpha;
    let neg_run = params.neg_per_k() - 1;
    let period_weight = r + s + s * alpha;
    let periods = neg_run / (r * period_weight);
    let n = (r * a + period_weight) * periods;
    let seq = periodic(params.alphabet(), n, a, neg_run);
    Ok(Construction::new(
        ConstructionKind::ApGoodShift,
        params,
        seq,
        ClaimedProperty::NoZeroSumAp {
            k,
            gcd_bound: false,
        },
        vec![format!(
            "alpha = {alpha}, period a = {a}, per-period weight = {period_weight}"
        )],
    ))
}

/// `k = 2p` construction of length `p^2 - 1`:
/// `f(j) = -1` iff `j mod 2p < p - 1`.
pub fn build_ap_two_p(p: u64) -> Result<Construction> {
    if p < 3 || !is_prime(p) {
        return precondition(format!("p must be an odd prime (got {p})"));
    }
    let k = 2 * p;
    let n = p * p - 1;
    let seq = periodic(Alphabet::PM1, n, k, p - 1);
    Ok(Construction::new(
        ConstructionKind::ApTwoP,
        Params::new(1, 1, k)?,
        seq,
        ClaimedProperty::NoZeroSumAp {
            k,
            gcd_bound: false,
        },
        vec![],
    ))
}

/// Inputs a construction may read; unused fields are ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructionRequest {
    pub r: Option<u64>,
    pub s: Option<u64>,
    pub k: Option<u64>,
    pub alpha: Option<u64>,
    pub factors: Option<Vec<u64>>,
    pub p: Option<u64>,
}

impl ConstructionRequest {
    fn params(&self) -> Result<Params> {
        let k = self.required_k()?;
        Params::new(self.r.unwrap_or(1), self.s.unwrap_or(1), k)
    }

    fn required_k(&self) -> Result<u64> {
        self.k
            .ok_or_else(|| Error::Precondition("k is required".into()))
    }
}

pub trait ConstructionStrategy: Send + Sync {
    fn kind(&self) -> ConstructionKind;

    fn build(&self, request: &ConstructionRequest) -> Result<Construction>;

    fn name(&self) -> &'static str {
        self.kind().name()
    }
}

struct BlockExtremal;
struct BlockExtremalNegated;
struct ApModK;
struct ApModKProduct;
struct ApModKPlus1;
struct ApGoodShift;
struct ApTwoP;

impl ConstructionStrategy for BlockExtremal {
    fn kind(&self) -> ConstructionKind {
        ConstructionKind::BlockExtremal
    }

    fn build(&self, request: &ConstructionRequest) -> Result<Construction> {
        build_block_extremal(request.params()?)
    }
}

impl ConstructionStrategy for BlockExtremalNegated {
    fn kind(&self) -> ConstructionKind {
        ConstructionKind::BlockExtremalNegated
    }

    fn build(&self, request: &ConstructionRequest) -> Result<Construction> {
        build_block_extremal_negated(request.params()?)
    }
}

impl ConstructionStrategy for ApModK {
    fn kind(&self) -> ConstructionKind {
        ConstructionKind::ApModK
    }

    fn build(&self, request: &ConstructionRequest) -> Result<Construction> {
        build_ap_mod_k(request.required_k()?)
    }
}

impl ConstructionStrategy for ApModKProduct {
    fn kind(&self) -> ConstructionKind {
        ConstructionKind::ApModKProduct
    }

    fn build(&self, request: &ConstructionRequest) -> Result<Construction> {
        let k = request.required_k()?;
        let factors = match &request.factors {
            Some(f) => f.clone(),
            None if k % 4 == 2 && k > 2 => vec![k / 2],
            None => return precondition("factors are required"),
        };
        let f = build_ap_mod_k_product(k, &factors)?;
        let notes = vec![format!(
            "residue table over Z/{k}: {} entries +1, {} entries -1",
            f.plus_count(),
            f.minus_count()
        )];
        Ok(Construction::new(
            ConstructionKind::ApModKProduct,
            Params::new(1, 1, k)?,
            f.table,
            ClaimedProperty::NonzeroResidueProgressions { k },
            notes,
        ))
    }
}

impl ConstructionStrategy for ApModKPlus1 {
    fn kind(&self) -> ConstructionKind {
        ConstructionKind::ApModKPlus1
    }

    fn build(&self, request: &ConstructionRequest) -> Result<Construction> {
        build_ap_mod_k_plus1(request.required_k()?)
    }
}

impl ConstructionStrategy for ApGoodShift {
    fn kind(&self) -> ConstructionKind {
        ConstructionKind::ApGoodShift
    }

    fn build(&self, request: &ConstructionRequest) -> Result<Construction> {
        let params = request.params()?;
        let alpha = match request.alpha {
            Some(a) => a,
            None => min_good_shift(params, None)?.alpha,
        };
        build_ap_good_shift(params, alpha)
    }
}

impl ConstructionStrategy for ApTwoP {
    fn kind(&self) -> ConstructionKind {
        ConstructionKind::ApTwoP
    }

    fn build(&self, request: &ConstructionRequest) -> Result<Construction> {
        let p = match (request.p, request.k) {
            (Some(p), _) => p,
            (None, Some(k)) if k % 2 == 0 => k / 2,
            _ => return precondition("p (or k = 2p) is required"),
        };
        build_ap_two_p(p)
    }
}

/// Construction strategies keyed by name.
pub struct ConstructionRegistry {
    strategies: BTreeMap<&'static str, Box<dyn ConstructionStrategy>>,
}

impl ConstructionRegistry {
    pub fn empty() -> Self {
        ConstructionRegistry {
            strategies: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(BlockExtremal);
        reg.register(BlockExtremalNegated);
        reg.register(ApModK);
        reg.register(ApModKProduct);
        reg.register(ApModKPlus1);
        reg.register(ApGoodShift);
        reg.register(ApTwoP);
        reg
    }

    pub fn register<S: ConstructionStrategy + 'static>(&mut self, strategy: S) {
        self.strategies.insert(strategy.name(), Box::new(strategy));
    }

    pub fn get(&self, name: &str) -> Option<&dyn ConstructionStrategy> {
        self.strategies.get(name).map(|b| b.as_ref())
    }

    pub fn build(&self, name: &str, request: &ConstructionRequest) -> Result<Construction> {
        match self.get(name) {
            Some(s) => s.build(request),
            None => precondition(format!(
                "unknown construction {name:?}; known: {}",
                self.names().join(", ")
            )),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }
}

impl Default for ConstructionRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

//! Closed-form thresholds.
//!
//! All evaluation runs over exact rationals with checked `i128` arithmetic.
//! Overflow is reported as [`Error::Overflow`], never wrapped, and a value
//! that must be integral but is not is a [`Error::FormulaDomain`] error.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub};
use serde::Serialize;

use crate::error::{precondition, Error, Result};
use crate::good_shift::is_good_shift;
use crate::params::Params;

type Q = Ratio<i128>;

fn q(n: impl Into<i128>) -> Q {
    Q::from_integer(n.into())
}

fn frac(n: impl Into<i128>, d: impl Into<i128>) -> Q {
    Q::new(n.into(), d.into())
}

fn add(a: Q, b: Q, what: &'static str) -> Result<Q> {
    a.checked_add(&b).ok_or(Error::Overflow(what))
}

fn sub(a: Q, b: Q, what: &'static str) -> Result<Q> {
    a.checked_sub(&b).ok_or(Error::Overflow(what))
}

fn mul(a: Q, b: Q, what: &'static str) -> Result<Q> {
    a.checked_mul(&b).ok_or(Error::Overflow(what))
}

fn integral(x: Q, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::FormulaDomain(format!(
            "{what} = {x} is not an integer"
        )));
    }
    i64::try_from(x.to_integer()).map_err(|_| Error::Overflow("result exceeds 64 bits"))
}

/// Smallest integer `>= x`, as `u64` (clamped below at 0).
fn ceil_u64(x: Q) -> Result<u64> {
    let c = x.ceil().to_integer().max(0);
    u64::try_from(c).map_err(|_| Error::Overflow("result exceeds 64 bits"))
}

/// The unique `t` in `[0, m)` with `value - 1 + t == 0 (mod m)`.
pub fn shift_parameter(value: u64, m: u64) -> u64 {
    let v = (value as i128 - 1).rem_euclid(m as i128) as u64;
    (m - v) % m
}

/// Evaluated exact block threshold `N(r, s, k) = max(k, M1, M2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub params: Params,
    pub t: u64,
    #[serde(rename = "tPrime")]
    pub t_prime: u64,
    pub m1: i64,
    pub m2: i64,
    pub n_exact: u64,
    pub notes: Vec<String>,
}

/// The q-slack sufficient length for a zero-sum k-block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SufficientBound {
    pub params: Params,
    pub q: u64,
    pub n_sufficient: u64,
}

/// One of the two branches of the exact threshold. `first` and `second` are
/// the letter magnitudes in the role of `r` and `s`; `shift` is `t` or `t'`.
fn threshold_branch(first: u64, second: u64, k: u64, shift: u64) -> Result<(Q, bool)> {
    let m = first + second;
    let base = frac(first as i128 * second as i128, (m * m) as i128);
    let base = mul(base, q(k), "r s k / (r + s)^2")?;
    let per_k = q((second * (k / m)) as i128);
    let small_case = shift <= first;
    let (coeff, tail) = if small_case {
        (
            frac(first as i128 + second as i128 * shift as i128, m as i128),
            q(shift as i128),
        )
    } else {
        (
            frac(
                first as i128 + first as i128 * (m - shift) as i128,
                m as i128,
            ),
            -q((m - shift) as i128),
        )
    };
    let b = sub(base, coeff, "block coefficient")?;
    let value = add(add(mul(b, q(k), "block term")?, per_k, "M")?, tail, "M")?;
    Ok((value, small_case))
}

/// `N(r, s, k)` for `r < s`, `gcd(r, s) = 1`, `(r + s) | k`.
pub fn exact_block_threshold(params: Params) -> Result<BoundReport> {
    params.require_divisible()?;
    let (r, s, k) = (params.r(), params.s(), params.k());
    if r >= s {
        return precondition(format!("exact threshold requires r < s (got r={r}, s={s})"));
    }
    let m = r + s;
    let t = shift_parameter(params.neg_per_k(), m);
    let t_prime = shift_parameter(params.pos_per_k(), m);

    let (m1, m1_small) = threshold_branch(r, s, k, t)?;
    let (m2, m2_small) = threshold_branch(s, r, k, t_prime)?;
    let m1 = integral(m1, "M1")?;
    let m2 = integral(m2, "M2")?;
    let n_exact = (k as i64).max(m1).max(m2) as u64;

    let mut notes = vec![
        format!(
            "M1 evaluated with the {} branch",
            if m1_small { "t <= r" } else { "t > r" }
        ),
        format!(
            "M2 evaluated with the {} branch",
            if m2_small { "t' <= s" } else { "t' > s" }
        ),
    ];
    if r == 1 {
        notes.push("t' > s branch unreachable for r = 1".into());
    }
    Ok(BoundReport {
        params,
        t,
        t_prime,
        m1,
        m2,
        n_exact,
        notes,
    })
}

/// [`exact_block_threshold`] extended to `r > s` by negating the sequence.
pub fn exact_block_threshold_symmetric(params: Params) -> Result<BoundReport> {
    if params.r() == params.s() {
        return precondition("symmetric threshold requires r != s");
    }
    if params.r() < params.s() {
        return exact_block_threshold(params);
    }
    let swapped = exact_block_threshold(params.swapped())?;
    let mut notes = vec![format!(
        "negation symmetry: evaluated at (r={}, s={}, k={}) and mapped back",
        params.s(),
        params.r(),
        params.k()
    )];
    notes.extend(swapped.notes);
    Ok(BoundReport {
        params,
        t: swapped.t_prime,
        t_prime: swapped.t,
        m1: swapped.m2,
        m2: swapped.m1,
        n_exact: swapped.n_exact,
        notes,
    })
}

/// Unified entry point: `r = s = 1` goes to [`pm1_block_threshold`] with
/// `q = 0`, everything else to [`exact_block_threshold_symmetric`].
pub fn block_threshold(params: Params) -> Result<BoundReport> {
    if !params.alphabet().is_pm1() {
        return exact_block_threshold_symmetric(params);
    }
    params.require_divisible()?;
    let k = params.k();
    let n = pm1_block_threshold(k, 0)?;
    let t = shift_parameter(k / 2, 2);
    Ok(BoundReport {
        params,
        t,
        t_prime: t,
        m1: n as i64,
        m2: n as i64,
        n_exact: n,
        notes: vec!["r = s = 1: evaluated with the {-1, 1} block threshold (q = 0)".into()],
    })
}

/// `max(k, k^2/4 + (q - s) k / 2 + s)` with `s in {0, 1}`,
/// `s == q + (k - 2)/2 (mod 2)`.
pub fn pm1_block_threshold(k: u64, q_slack: u64) -> Result<u64> {
    if k < 2 || !k.is_multiple_of(2) {
        return precondition(format!("k must be even and at least 2 (got {k})"));
    }
    let s = (q_slack + (k - 2) / 2) % 2;
    let value = add(
        frac(k as i128 * k as i128, 4),
        mul(frac(q_slack as i128 - s as i128, 2), q(k), "(q - s) k / 2")?,
        "block threshold",
    )?;
    let value = add(value, q(s as i128), "block threshold")?;
    Ok(ceil_u64(value)?.max(k))
}

/// Length guaranteeing a k-block of absolute weight at most `t` in a
/// `{-1, 1}`-sequence with `|total| <= q`.
pub fn pm1_smallsum_threshold(k: u64, t: u64, q_slack: u64) -> Result<u64> {
    if t >= k {
        return precondition(format!("need 0 <= t < k (got t={t}, k={k})"));
    }
    if !(k - t).is_multiple_of(2) {
        return precondition(format!("t must have the parity of k (got t={t}, k={k})"));
    }
    let m = t + 2;
    // t < k with equal parity gives k - t >= 2
    let s = (q_slack + (k - t - 2) / 2) % m;
    let kk = k as i128;
    let value = frac(kk * kk, 2 * m as i128);
    let value = add(
        value,
        mul(
            frac(q_slack as i128 - s as i128, m as i128),
            q(kk),
            "(q - s) k / (t + 2)",
        )?,
        "small-sum threshold",
    )?;
    let value = add(
        value,
        frac(2 * s as i128 - t as i128, 2),
        "small-sum threshold",
    )?;
    Ok(ceil_u64(value)?.max(k))
}

/// Least `n >= k` satisfying both real-valued lower bounds that force a
/// zero-sum k-block once `|f([n])| <= q`.
pub fn sufficient_block_bound(params: Params, q_slack: u64) -> Result<SufficientBound> {
    params.require_divisible()?;
    let k = params.k();
    let branch = |first: u64, second: u64| -> Result<Q> {
        let m = (first + second) as i128;
        let inner = add(
            frac(q_slack as i128 - first as i128, m),
            mul(
                frac(first as i128 * second as i128, m * m),
                q(k),
                "r s k / (r + s)^2",
            )?,
            "floor argument",
        )?;
        let fl = q(inner.floor().to_integer());
        let v = mul(q(k), fl, "k * floor")?;
        let v = add(v, q((second * (k / (first + second))) as i128), "bound")?;
        add(v, frac(first as i128, second as i128), "bound")
    };
    let b1 = branch(params.r(), params.s())?;
    let b2 = branch(params.s(), params.r())?;
    let n = ceil_u64(b1)?.max(ceil_u64(b2)?).max(k);
    Ok(SufficientBound {
        params,
        q: q_slack,
        n_sufficient: n,
    })
}

/// Length of the good-shift construction,
/// `(r (k + alpha) + (r + s + s alpha)) * floor((s k / (r + s) - 1) / (r (r + s + s alpha)))`.
pub fn ap_lower_bound_value(params: Params, alpha: u64) -> Result<u64> {
    params.require_divisible()?;
    let verdict = is_good_shift(params, alpha);
    if !verdict.good {
        return precondition(format!("alpha = {alpha} is not a good shift for {params}"));
    }
    let (r, s, k) = (params.r() as u128, params.s() as u128, params.k() as u128);
    let alpha = alpha as u128;
    let period_weight = s
        .checked_mul(alpha)
        .and_then(|x| x.checked_add(r + s))
        .ok_or(Error::Overflow("r + s + s alpha"))?;
    let neg_run = params.neg_per_k() as u128 - 1;
    let denom = r
        .checked_mul(period_weight)
        .ok_or(Error::Overflow("r (r + s + s alpha)"))?;
    let periods = neg_run / denom;
    let unit = r
        .checked_mul(k + alpha)
        .and_then(|x| x.checked_add(period_weight))
        .ok_or(Error::Overflow("r (k + alpha) + r + s + s alpha"))?;
    let n = unit
        .checked_mul(periods)
        .ok_or(Error::Overflow("ap lower bound"))?;
    u64::try_from(n).map_err(|_| Error::Overflow("ap lower bound exceeds 64 bits"))
}

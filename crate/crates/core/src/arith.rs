//! Elementary number theory shared by the other modules: residue profiles
//! of progressions, the weight-range sets `S_alpha`, trial-division
//! factorization and exact binomials.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::params::Alphabet;

/// Shape of the multiset `{start + j d mod m : 0 <= j < m}`.
///
/// The distinct residues are `first_residue, first_residue + step, ...`
/// (`distinct_count` of them), each hit `multiplicity` times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidueProfile {
    pub modulus: u64,
    pub first_residue: u64,
    pub step: u64,
    pub distinct_count: u64,
    pub multiplicity: u64,
}

impl ResidueProfile {
    pub fn residues(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.distinct_count).map(move |i| self.first_residue + i * self.step)
    }
}

pub fn residue_profile(start: i64, d: u64, m: u64) -> Result<ResidueProfile> {
    if d == 0 || m == 0 {
        return precondition("residue_profile needs d >= 1 and m >= 1");
    }
    let g = d.gcd(&m);
    Ok(ResidueProfile {
        modulus: m,
        first_residue: start.rem_euclid(g as i64) as u64,
        step: g,
        distinct_count: m / g,
        multiplicity: g,
    })
}

/// `S_alpha`: every possible total weight of a `{-r, s}`-sequence of
/// length exactly `alpha`, i.e. `{-r alpha + (r + s) i : 0 <= i <= alpha}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WeightRange {
    pub alpha: u64,
    pub low: i64,
    pub step: u64,
    pub count: u64,
}

pub fn weight_range(alpha: u64, alphabet: Alphabet) -> WeightRange {
    WeightRange {
        alpha,
        low: -((alphabet.r() * alpha) as i64),
        step: alphabet.modulus(),
        count: alpha + 1,
    }
}

impl WeightRange {
    pub fn high(&self) -> i64 {
        self.low + (self.step * (self.count - 1)) as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.count).map(move |i| self.low + (i * self.step) as i64)
    }

    pub fn contains(&self, w: i64) -> bool {
        w >= self.low && w <= self.high() && (w - self.low) % self.step as i64 == 0
    }

    /// The lowest element of the set divisible by `p` (with every positive
    /// integer dividing 0), computed without enumerating the set.
    pub fn first_multiple_of(&self, p: u64) -> Option<i64> {
        assert!(p >= 1);
        let p_i = p as i128;
        let low = self.low as i128;
        let step = self.step as i128;
        // low + step * i == 0 (mod p)
        let g = step.gcd(&p_i);
        if low.rem_euclid(g) != 0 {
            return None;
        }
        let modulus = p_i / g;
        let target = (-low / g).rem_euclid(modulus);
        let i0 = if modulus == 1 {
            0
        } else {
            let inv = mod_inverse((step / g).rem_euclid(modulus), modulus)?;
            (target * inv).rem_euclid(modulus)
        };
        (i0 < self.count as i128).then(|| (low + step * i0) as i64)
    }
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let e = a.extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// Distinct prime factors of `n` in increasing order, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
    }
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        for q in [p, p + 2] {
            if n.is_multiple_of(q) {
                out.push(q);
                while n.is_multiple_of(q) {
                    n /= q;
                }
            }
        }
        p += 6;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) || n.is_multiple_of(p + 2) {
            return false;
        }
        p += 6;
    }
    true
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

//! Good shifts: `alpha` such that no prime factor of `k + alpha` divides any
//! element of `S_alpha` (every positive integer divides 0).

use serde::Serialize;

use crate::arith::{is_prime, prime_factors, weight_range, WeightRange};
use crate::error::{Error, Result};
use crate::params::Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingWitness {
    pub prime: u64,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GoodShift {
    pub params: Params,
    pub alpha: u64,
    pub a: u64,
    pub prime_factors_of_a: Vec<u64>,
    pub s_alpha: WeightRange,
    pub good: bool,
    pub blocking_witness: Option<BlockingWitness>,
}

/// Decide whether `alpha` is a good shift for `params`.
///
/// Divisibility `(r + s) | k` is not required here; only the constructions
/// that consume a good shift need it.
pub fn is_good_shift(params: Params, alpha: u64) -> GoodShift {
    let a = params.k() + alpha;
    let primes = prime_factors(a);
    let s_alpha = weight_range(alpha, params.alphabet());
    let blocking_witness = if alpha == 0 {
        Some(BlockingWitness {
            prime: primes.first().copied().unwrap_or(a),
            weight: 0,
        })
    } else {
        primes.iter().find_map(|&p| {
            s_alpha
                .first_multiple_of(p)
                .map(|weight| BlockingWitness { prime: p, weight })
        })
    };
    GoodShift {
        params,
        alpha,
        a,
        prime_factors_of_a: primes,
        s_alpha,
        good: blocking_witness.is_none(),
        blocking_witness,
    }
}

/// Whether `alpha` qualifies as a prime shift: `k + alpha` prime, larger
/// than `s alpha`, and certified good.
fn prime_candidate(params: Params, alpha: u64) -> Option<GoodShift> {
    let a = params.k() + alpha;
    if !is_prime(a) || a <= params.s() * alpha {
        return None;
    }
    // 0 can still lie in S_alpha, and every prime divides 0.
    let shift = is_good_shift(params, alpha);
    shift.good.then_some(shift)
}

/// `ceil(k^0.525)`, the prime-gap search window for [`prime_shift`].
pub fn prime_gap_horizon(k: u64) -> u64 {
    ((k as f64).powf(0.525).ceil() as u64).max(1)
}

/// Smallest `alpha >= 1` such that `k + alpha` is a prime exceeding
/// `s alpha` and `alpha` is good, searched over `alpha <= ceil(k^0.525)`.
pub fn prime_shift(params: Params) -> Result<GoodShift> {
    let horizon = prime_gap_horizon(params.k());
    (1..=horizon)
        .find_map(|alpha| prime_candidate(params, alpha))
        .ok_or(Error::SearchFailure {
            from: 1,
            to: horizon,
        })
}

fn default_horizon(params: Params) -> u64 {
    let limit = params.k().max(64);
    (1..=limit)
        .find(|&alpha| prime_candidate(params, alpha).is_some())
        .unwrap_or(limit)
}

/// Smallest good shift `alpha >= 1`, searching up to `horizon`.
///
/// The default horizon is the first prime shift, which is itself good. For
/// small k there may be none (every prime `k + alpha` is at most `s alpha`);
/// the horizon is then `max(k, 64)`.
pub fn min_good_shift(params: Params, horizon: Option<u64>) -> Result<GoodShift> {
    let horizon = match horizon {
        Some(h) => h,
        None => default_horizon(params),
    };
    (1..=horizon)
        .map(|alpha| is_good_shift(params, alpha))
        .find(|g| g.good)
        .ok_or(Error::SearchFailure {
            from: 1,
            to: horizon,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: u64, s: u64, k: u64) -> Params {
        Params::new(r, s, k).unwrap()
    }

    /// Independent check by enumerating S_alpha.
    fn good_by_enumeration(params: Params, alpha: u64) -> bool {
        if alpha == 0 {
            return false;
        }
        let a = params.k() + alpha;
        let primes: Vec<u64> = (2..=a)
            .filter(|&d| a.is_multiple_of(d) && is_prime(d))
            .collect();
        let range = weight_range(alpha, params.alphabet());
        !primes
            .iter()
            .any(|&p| range.iter().any(|w| w % p as i64 == 0))
    }

    #[test]
    fn pm1_alpha_one_is_always_good() {
        for k in (2..200).step_by(2) {
            assert!(is_good_shift(p(1, 1, k), 1).good);
        }
    }

    #[test]
    fn one_two_parity_rule() {
        for k in (3..300).step_by(3) {
            let alpha = if k % 2 == 0 { 1 } else { 2 };
            assert!(is_good_shift(p(1, 2, k), alpha).good, "k={k}");
        }
    }

    #[test]
    fn zero_shift_is_never_good() {
        for (r, s, k) in [(1, 1, 6), (1, 2, 9), (2, 3, 10)] {
            let g = is_good_shift(p(r, s, k), 0);
            assert!(!g.good);
            assert_eq!(g.blocking_witness.unwrap().weight, 0);
        }
    }

    #[test]
    fn min_shift_examples() {
        assert_eq!(min_good_shift(p(1, 1, 20), None).unwrap().alpha, 1);
        let g = min_good_shift(p(1, 2, 20), None).unwrap();
        assert_eq!(
            (g.alpha, g.a, g.prime_factors_of_a.clone()),
            (1, 21, vec![3, 7])
        );
        let blocked = is_good_shift(p(1, 2, 21), 1);
        assert_eq!(
            blocked.blocking_witness,
            Some(BlockingWitness {
                prime: 2,
                weight: 2
            })
        );
        assert_eq!(min_good_shift(p(1, 2, 21), None).unwrap().alpha, 2);
    }

    #[test]
    fn prime_shift_examples() {
        let g = prime_shift(p(2, 3, 100)).unwrap();
        assert_eq!((g.alpha, g.a), (1, 101));
        let g = prime_shift(p(1, 2, 24)).unwrap();
        assert_eq!((g.alpha, g.a), (5, 29));
        for (r, s) in [(1, 2), (2, 3), (1, 4), (3, 5)] {
            for j in 10..200 {
                let params = p(r, s, j * (r + s));
                if let Ok(g) = prime_shift(params) {
                    assert!(g.good);
                    assert!(s * g.alpha < g.a);
                    assert!(is_prime(g.a));
                }
            }
        }
    }

    #[test]
    fn prime_shift_skips_shifts_with_zero_weight() {
        // Only reachable when (r + s) does not divide k: here 0 is in S_3.
        let params = p(1, 2, 8);
        let g = is_good_shift(params, 3);
        assert_eq!(g.a, 11);
        assert!(g.s_alpha.contains(0));
        assert!(!g.good);
        assert!(prime_candidate(params, 3).is_none());
    }

    #[test]
    fn arithmetic_test_matches_enumeration() {
        for (r, s) in [(1, 1), (1, 2), (2, 3), (3, 4), (1, 5), (4, 1)] {
            for k in 1..60 {
                for alpha in 0..25 {
                    let params = p(r, s, k);
                    assert_eq!(
                        is_good_shift(params, alpha).good,
                        good_by_enumeration(params, alpha),
                        "r={r} s={s} k={k} alpha={alpha}"
                    );
                }
            }
        }
    }

    #[test]
    fn min_shift_is_minimal() {
        for (r, s) in [(1, 2), (2, 3), (3, 4), (2, 5)] {
            for j in 1..80 {
                let params = p(r, s, j * (r + s));
                let g = min_good_shift(params, None).unwrap();
                assert!(good_by_enumeration(params, g.alpha));
                for smaller in 1..g.alpha {
                    assert!(!good_by_enumeration(params, smaller));
                }
            }
        }
    }

    #[test]
    fn exhausted_horizon_reports_range() {
        assert_eq!(
            min_good_shift(p(1, 2, 21), Some(1)),
            Err(Error::SearchFailure { from: 1, to: 1 })
        );
    }
}

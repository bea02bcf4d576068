//! The letter pair `{-r, s}` and the parameter triple `(r, s, k)`.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{precondition, Result};

/// A normalized two-letter alphabet `{-r, +s}` with `gcd(r, s) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Alphabet {
    r: u64,
    s: u64,
}

impl Alphabet {
    /// The `{-1, +1}` alphabet.
    pub const PM1: Alphabet = Alphabet { r: 1, s: 1 };

    pub fn new(r: u64, s: u64) -> Result<Self> {
        if r == 0 || s == 0 {
            return precondition(format!("r and s must be positive (got r={r}, s={s})"));
        }
        if r.gcd(&s) != 1 {
            return precondition(format!(
                "gcd(r, s) must be 1 (got r={r}, s={s}); divide both by {}",
                r.gcd(&s)
            ));
        }
        if r > i64::MAX as u64 / 4 || s > i64::MAX as u64 / 4 {
            return precondition("r and s must fit comfortably in 62 bits");
        }
        Ok(Alphabet { r, s })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    /// `r + s`, the modulus every zero-sum length is a multiple of.
    pub fn modulus(&self) -> u64 {
        self.r + self.s
    }

    pub fn is_pm1(&self) -> bool {
        self.r == 1 && self.s == 1
    }

    /// The alphabet `{-s, +r}` obtained by negating every letter.
    pub fn negated(&self) -> Alphabet {
        Alphabet {
            r: self.s,
            s: self.r,
        }
    }

    /// Letter value for a selector bit: `false => -r`, `true => +s`.
    #[inline]
    pub fn value(&self, bit: bool) -> i64 {
        if bit {
            self.s as i64
        } else {
            -(self.r as i64)
        }
    }

    /// Selector bit for a letter value, if the value is in the alphabet.
    pub fn selector(&self, value: i64) -> Option<bool> {
        if value == self.s as i64 {
            Some(true)
        } else if value == -(self.r as i64) {
            Some(false)
        } else {
            None
        }
    }
}

/// The triple `(r, s, k)`.
///
/// Divisibility `(r + s) | k` is not enforced at construction because
/// exploratory scans and shift searches accept any `k`; operations that
/// need it call [`Params::require_divisible`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Params {
    r: u64,
    s: u64,
    k: u64,
}

impl Params {
    pub fn new(r: u64, s: u64, k: u64) -> Result<Self> {
        let alphabet = Alphabet::new(r, s)?;
        Self::with_alphabet(alphabet, k)
    }

    pub fn with_alphabet(alphabet: Alphabet, k: u64) -> Result<Self> {
        if k == 0 {
            return precondition("k must be positive");
        }
        if k > i64::MAX as u64 / 4 {
            return precondition("k must fit comfortably in 62 bits");
        }
        Ok(Params {
            r: alphabet.r,
            s: alphabet.s,
            k,
        })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet {
            r: self.r,
            s: self.s,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.r + self.s
    }

    /// Parameters for the negated alphabet `{-s, +r}` with the same `k`.
    pub fn swapped(&self) -> Params {
        Params {
            r: self.s,
            s: self.r,
            k: self.k,
        }
    }

    pub fn is_divisible(&self) -> bool {
        self.k.is_multiple_of(self.modulus())
    }

    pub fn require_divisible(&self) -> Result<()> {
        if self.is_divisible() {
            Ok(())
        } else {
            precondition(format!(
                "r + s = {} must divide k = {}",
                self.modulus(),
                self.k
            ))
        }
    }

    /// `s k / (r + s)`: the number of `-r` letters in a zero-sum k-set.
    pub fn neg_per_k(&self) -> u64 {
        debug_assert!(self.is_divisible());
        self.s * (self.k / self.modulus())
    }

    /// `r k / (r + s)`: the number of `+s` letters in a zero-sum k-set.
    pub fn pos_per_k(&self) -> u64 {
        debug_assert!(self.is_divisible());
        self.r * (self.k / self.modulus())
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(r={}, s={}, k={})", self.r, self.s, self.k)
    }
}

//! Bit-packed `{-r, s}` sequences with lazily built prefix weights.

use std::sync::OnceLock;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::Alphabet;

/// Sum of sequence values over some index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Weight(pub i64);

/// A finite `{-r, +s}`-valued sequence, one selector bit per position
/// (`0 => -r`, `1 => +s`). Positions are 0-based.
#[derive(Clone, Debug)]
pub struct SignSeq {
    alphabet: Alphabet,
    words: Vec<u64>,
    len: usize,
    prefix: OnceLock<Vec<i64>>,
}

impl SignSeq {
    pub fn from_bits<I: IntoIterator<Item = bool>>(alphabet: Alphabet, bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        for bit in bits {
            if len.is_multiple_of(64) {
                words.push(0);
            }
            if bit {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        SignSeq {
            alphabet,
            words,
            len,
            prefix: OnceLock::new(),
        }
    }

    /// Builds a sequence from explicit letter values; every value must be
    /// `-r` or `+s`.
    pub fn from_values(alphabet: Alphabet, values: &[i64]) -> Result<Self> {
        let mut bits = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            match alphabet.selector(v) {
                Some(b) => bits.push(b),
                None => {
                    return Err(Error::Precondition(format!(
                        "value {v} at position {i} is not in {{-{}, {}}}",
                        alphabet.r(),
                        alphabet.s()
                    )))
                }
            }
        }
        Ok(Self::from_bits(alphabet, bits))
    }

    /// Low `len` bits of `mask` as selectors, bit `i` for position `i`.
    pub fn from_mask(alphabet: Alphabet, mask: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self::from_bits(alphabet, (0..len).map(|i| mask >> i & 1 == 1))
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Self::from_bits(alphabet, std::iter::empty())
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Selector bit at position `i`. Panics when out of range.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "position {i} out of range for length {}",
            self.len
        );
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn value(&self, i: usize) -> i64 {
        self.alphabet.value(self.bit(i))
    }

    pub fn get(&self, i: usize) -> Option<i64> {
        (i < self.len).then(|| self.value(i))
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len).map(move |i| self.value(i))
    }

    pub fn to_vec(&self) -> Vec<i64> {
        self.values().collect()
    }

    /// Number of `+s` letters.
    pub fn count_positive(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_negative(&self) -> usize {
        self.len - self.count_positive()
    }

    /// `prefix[i]` is the weight of positions `[0, i)`; length `n + 1`.
    pub fn prefix_weights(&self) -> &[i64] {
        self.prefix.get_or_init(|| {
            let mut p = Vec::with_capacity(self.len + 1);
            let mut acc = 0i64;
            p.push(0);
            for v in self.values() {
                acc += v;
                p.push(acc);
            }
            p
        })
    }

    pub fn total_weight(&self) -> Weight {
        Weight(self.prefix_weights()[self.len])
    }

    /// Weight of the contiguous range `[start, end)`.
    pub fn range_weight(&self, start: usize, end: usize) -> Result<Weight> {
        if end > self.len {
            return Err(Error::IndexOutOfRange {
                index: end.saturating_sub(1),
                len: self.len,
            });
        }
        if start > end {
            return Err(Error::Precondition(format!(
                "range start {start} exceeds end {end}"
            )));
        }
        let p = self.prefix_weights();
        Ok(Weight(p[end] - p[start]))
    }

    /// Weight of an arbitrary index set.
    pub fn weight(&self, indices: &[usize]) -> Result<Weight> {
        let mut w = 0i64;
        for &i in indices {
            if i >= self.len {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.len,
                });
            }
            w += self.value(i);
        }
        Ok(Weight(w))
    }

    /// Term-wise negation. The result lives over `{-s, +r}`.
    pub fn negated(&self) -> SignSeq {
        SignSeq::from_bits(self.alphabet.negated(), self.bits().map(|b| !b))
    }

    /// Selector bits as a `0`/`1` string.
    pub fn to_bitstring(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl PartialEq for SignSeq {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.len == other.len && self.words == other.words
    }
}

impl Eq for SignSeq {}

impl PartialOrd for SignSeq {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on selector bits, `-r` before `+s`.
impl Ord for SignSeq {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.alphabet.r(), self.alphabet.s())
            .cmp(&(other.alphabet.r(), other.alphabet.s()))
            .then_with(|| self.bits().cmp(other.bits()))
    }
}

impl Serialize for SignSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SignSeq", 4)?;
        st.serialize_field("r", &self.alphabet.r())?;
        st.serialize_field("s", &self.alphabet.s())?;
        st.serialize_field("n", &self.len)?;
        st.serialize_field("values", &self.to_vec())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a12() -> Alphabet {
        Alphabet::new(1, 2).unwrap()
    }

    #[test]
    fn balanced_pair_has_zero_weight() {
        let seq = SignSeq::from_values(Alphabet::PM1, &[-1, 1]).unwrap();
        assert_eq!(seq.weight(&[0, 1]).unwrap(), Weight(0));
    }

    #[test]
    fn block_extremal_sequence_is_zero_sum() {
        let seq = SignSeq::from_values(a12(), &[-1, -1, -1, 2, 2, 2, -1, -1, -1]).unwrap();
        let all: Vec<usize> = (0..seq.len()).collect();
        assert_eq!(seq.weight(&all).unwrap(), Weight(0));
        assert_eq!(seq.total_weight(), Weight(0));
        assert_eq!(seq.range_weight(0, 6).unwrap(), Weight(3));
    }

    #[test]
    fn out_of_range_index_is_an_error() {
        let seq = SignSeq::from_values(Alphabet::PM1, &[1, -1, 1]).unwrap();
        assert_eq!(
            seq.weight(&[0, 3]),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        );
        assert!(seq.range_weight(1, 4).is_err());
    }

    #[test]
    fn rejects_foreign_values() {
        assert!(SignSeq::from_values(a12(), &[-1, 1]).is_err());
    }

    #[test]
    fn crosses_word_boundaries() {
        let bits: Vec<bool> = (0..150).map(|i| i % 3 == 0).collect();
        let seq = SignSeq::from_bits(Alphabet::PM1, bits.clone());
        assert_eq!(seq.len(), 150);
        assert!(seq.bits().eq(bits.into_iter()));
        assert_eq!(seq.count_positive(), 50);
        assert_eq!(seq.total_weight(), Weight(50 - 100));
    }

    #[test]
    fn negation_swaps_alphabet() {
        let seq = SignSeq::from_values(a12(), &[-1, 2, -1]).unwrap();
        let neg = seq.negated();
        assert_eq!(neg.alphabet(), Alphabet::new(2, 1).unwrap());
        assert_eq!(neg.to_vec(), vec![1, -2, 1]);
    }
}

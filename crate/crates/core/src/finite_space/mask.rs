use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// A subset of the points `0..n`, stored as a little-endian word array.
///
/// Bits at positions `>= n` are always zero. The total order is the numeric
/// order of the mask read as a binary number (bit `i` has weight `2^i`); this
/// is the order used for every tie-break in the crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl SubsetMask {
    pub fn empty(n: usize) -> Self {
        SubsetMask {
            n,
            words: vec![0; word_count(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut m = SubsetMask {
            n,
            words: vec![u64::MAX; word_count(n)],
        };
        m.clear_tail();
        m
    }

    pub fn singleton(n: usize, i: usize) -> Self {
        let mut m = Self::empty(n);
        m.insert(i);
        m
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::empty(n);
        for i in indices {
            m.insert(i);
        }
        m
    }

    /// Builds a mask from the low `n` bits of `bits`; `n` must be at most 64.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= 64, "from_bits requires n <= 64");
        let mut m = Self::empty(n);
        if n > 0 {
            m.words[0] = bits;
        }
        m.clear_tail();
        m
    }

    /// The mask as a `u64`, when `n <= 64`.
    pub fn bits(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.n, "index {i} out of range for {} points", self.n);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.n {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn with(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.insert(i);
        m
    }

    pub fn without(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.remove(i);
        m
    }

    fn check_len(&self, other: &Self) {
        assert_eq!(self.n, other.n, "masks over different ground sets");
    }

    pub fn union(&self, other: &Self) -> Self {
        self.check_len(other);
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.check_len(other);
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.check_len(other);
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let mut m = SubsetMask {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        m.clear_tail();
        m
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_len(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.check_len(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Indices of members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Big-endian hex of the numeric value, `0x`-prefixed and zero-padded to
    /// `ceil(n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.n.div_ceil(4).max(1);
        let mut s = String::with_capacity(digits + 2);
        s.push_str("0x");
        for d in (0..digits).rev() {
            let bit = d * 4;
            let nibble = (self.words.get(bit / 64).copied().unwrap_or(0) >> (bit % 64)) & 0xf;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let digits = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        if digits.is_empty() {
            return Err(Error::invalid("empty hex mask"));
        }
        let mut m = Self::empty(n);
        for (pos, c) in digits.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::invalid(format!("bad hex digit {c:?} in mask")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let i = pos * 4 + b;
                    if i >= n {
                        return Err(Error::invalid(format!(
                            "mask {hex} has bit {i} set but the space has {n} points"
                        )));
                    }
                    m.insert(i);
                }
            }
        }
        Ok(m)
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        SubsetMask {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn clear_tail(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

//! Fixed-width bitsets over a ground set `{0, .., n-1}`.

use std::cmp::Ordering;
use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::{OcrsError, Result};

const WORD: usize = 64;

/// A subset of `{0, .., n-1}`. Two inline words cover every ground set up to 128.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: usize,
    words: SmallVec<[u64; 2]>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

impl SubsetMask {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: smallvec![0; word_count(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut m = Self::empty(n);
        for (w, word) in m.words.iter_mut().enumerate() {
            let lo = w * WORD;
            let hi = (lo + WORD).min(n);
            if hi > lo {
                let width = hi - lo;
                *word = if width == WORD {
                    u64::MAX
                } else {
                    (1u64 << width) - 1
                };
            }
        }
        m
    }

    pub fn singleton(n: usize, element: usize) -> Result<Self> {
        Self::from_elements(n, [element])
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elements: I) -> Result<Self> {
        let mut m = Self::empty(n);
        for e in elements {
            if e >= n {
                return Err(OcrsError::ElementOutOfRange { element: e, n });
            }
            m.insert(e);
        }
        Ok(m)
    }

    /// Builds a mask from the low `n` bits of `bits`; requires `n <= 64`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= WORD, "from_bits needs n <= 64");
        let mut m = Self::empty(n);
        m.words[0] = if n == WORD {
            bits
        } else {
            bits & ((1u64 << n) - 1)
        };
        m
    }

    /// The bits as a single word when `n <= 64`.
    pub fn as_bits(&self) -> Option<u64> {
        (self.n <= WORD).then(|| self.words[0])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cardinality(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        e < self.n && self.words[e / WORD] >> (e % WORD) & 1 == 1
    }

    /// Panics if `e >= n`.
    #[inline]
    pub fn insert(&mut self, e: usize) {
        assert!(
            e < self.n,
            "element {e} outside ground set of size {}",
            self.n
        );
        self.words[e / WORD] |= 1 << (e % WORD);
    }

    #[inline]
    pub fn remove(&mut self, e: usize) {
        if e < self.n {
            self.words[e / WORD] &= !(1 << (e % WORD));
        }
    }

    pub fn with(&self, e: usize) -> Self {
        let mut m = self.clone();
        m.insert(e);
        m
    }

    pub fn without(&self, e: usize) -> Self {
        let mut m = self.clone();
        m.remove(e);
        m
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        Self::full(self.n).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        debug_assert_eq!(self.n, other.n, "ground sizes differ");
        let words = self
            .words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self { n: self.n, words }
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words[0],
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, starting with the empty set. Requires `n <= 64`.
    pub fn subsets(&self) -> Subsets {
        let set = self.as_bits().expect("subset enumeration needs n <= 64");
        Subsets {
            n: self.n,
            set,
            next: Some(0),
        }
    }

    /// Every subset of `{0, .., n-1}` in increasing numeric order.
    pub fn all(n: usize) -> Subsets {
        Self::full(n).subsets()
    }
}

impl Ord for SubsetMask {
    /// Numeric order of the bit pattern, ground size first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
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

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Carry-ripple enumeration of all submasks.
pub struct Subsets {
    n: usize,
    set: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        let cur = self.next?;
        let following = cur.wrapping_sub(self.set) & self.set;
        self.next = (following != 0).then_some(following);
        Some(SubsetMask::from_bits(self.n, cur))
    }
}

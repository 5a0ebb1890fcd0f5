use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Fixed-universe bit set over `0..universe`.
///
/// Used for both attribute sets and object sets; two sets can only be
/// combined when their universes agree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    universe: usize,
}

/// A set of attribute indices into a context's attribute list.
pub type AttributeSet = BitSet;

/// A set of object indices into a context's object list.
pub type ObjectSet = BitSet;

impl BitSet {
    pub fn empty(universe: usize) -> Self {
        BitSet {
            words: vec![0; universe.div_ceil(WORD)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = BitSet {
            words: vec![!0; universe.div_ceil(WORD)],
            universe,
        };
        s.clear_tail();
        s
    }

    pub fn from_indices<I>(universe: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut s = BitSet::empty(universe);
        for i in indices {
            if i >= universe {
                return Err(Error::invalid(format!(
                    "index {i} out of range for a universe of {universe}"
                )));
            }
            s.insert(i);
        }
        Ok(s)
    }

    fn clear_tail(&mut self) {
        let rem = self.universe % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Panics when `i` is outside the universe.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.universe, "index {i} out of range {}", self.universe);
        let (w, b) = (i / WORD, i % WORD);
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !was
    }

    #[inline]
    pub fn remove(&mut self, i: usize) -> bool {
        if i >= self.universe {
            return false;
        }
        let (w, b) = (i / WORD, i % WORD);
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        was
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference(&self, other: &BitSet) -> BitSet {
        debug_assert_eq!(self.universe, other.universe);
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
            universe: self.universe,
        }
    }

    /// Drops every member `>= bound`.
    pub fn retain_below(&mut self, bound: usize) {
        if bound >= self.universe {
            return;
        }
        let (w, b) = (bound / WORD, bound % WORD);
        self.words[w] &= (1u64 << b) - 1;
        for word in &mut self.words[w + 1..] {
            *word = 0;
        }
    }

    /// True when `self` and `other` agree on every index `< bound`.
    pub fn agrees_below(&self, other: &BitSet, bound: usize) -> bool {
        let bound = bound.min(self.universe);
        let (w, b) = (bound / WORD, bound % WORD);
        if self.words[..w] != other.words[..w] {
            return false;
        }
        b == 0 || (self.words[w] ^ other.words[w]) & ((1u64 << b) - 1) == 0
    }

    pub fn min(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Lectic order on sets over the same universe: the smaller index of the
    /// symmetric difference decides, and the set holding it is the larger.
    pub fn lectic_cmp(&self, other: &BitSet) -> Ordering {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let low = diff & diff.wrapping_neg();
                return if b & low != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl fmt::Debug for BitSet {
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
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a BitSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_respects_universe() {
        let s = BitSet::full(70);
        assert_eq!(s.len(), 70);
        assert!(!s.contains(70));
        assert_eq!(s.iter().last(), Some(69));
        assert!(BitSet::full(0).is_empty());
    }

    #[test]
    fn from_indices_rejects_out_of_range() {
        assert!(BitSet::from_indices(3, [0, 3]).is_err());
        let s = BitSet::from_indices(130, [129, 0, 64]).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(s.min(), Some(0));
    }

    #[test]
    fn retain_below_and_agreement() {
        let mut s = BitSet::from_indices(130, [1, 63, 64, 100]).unwrap();
        let t = BitSet::from_indices(130, [1, 63, 65]).unwrap();
        assert!(s.agrees_below(&t, 64));
        assert!(!s.agrees_below(&t, 65));
        s.retain_below(64);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 63]);
    }

    #[test]
    fn lectic_order_small_universe() {
        // over {0,1,2}: {} < {2} < {1} < {1,2} < {0} < ...
        let sets: Vec<BitSet> = [vec![], vec![2], vec![1], vec![1, 2], vec![0], vec![0, 2]]
            .into_iter()
            .map(|v| BitSet::from_indices(3, v).unwrap())
            .collect();
        for w in sets.windows(2) {
            assert_eq!(w[0].lectic_cmp(&w[1]), Ordering::Less, "{:?} {:?}", w[0], w[1]);
        }
    }
}

//! Indel distance (substitution costs 2) and the ratios built on it.
//!
//! With substitutions at cost 2 the distance is `|a| + |b| - 2 * lcs(a, b)`,
//! so everything reduces to a longest-common-subsequence length, computed
//! here with the bit-parallel recurrence of Hyyrö. Lengths count Unicode
//! scalar values.

use std::collections::HashMap;

/// Match masks of a fixed pattern, reusable against many texts.
#[derive(Clone, Debug)]
pub struct IndelMatcher {
    len: usize,
    words: usize,
    /// Masks of ASCII characters, `words` entries per code point.
    ascii: Vec<u64>,
    other: HashMap<char, Vec<u64>>,
}

impl IndelMatcher {
    pub fn new(pattern: &str) -> Self {
        let chars: Vec<char> = pattern.chars().collect();
        let words = chars.len().div_ceil(64);
        let mut ascii = vec![0u64; 128 * words];
        let mut other: HashMap<char, Vec<u64>> = HashMap::new();
        for (i, &c) in chars.iter().enumerate() {
            let bit = 1 << (i % 64);
            if c.is_ascii() {
                ascii[c as usize * words + i / 64] |= bit;
            } else {
                other.entry(c).or_insert_with(|| vec![0; words])[i / 64] |= bit;
            }
        }
        IndelMatcher {
            len: chars.len(),
            words,
            ascii,
            other,
        }
    }

    pub fn pattern_len(&self) -> usize {
        self.len
    }

    fn mask(&self, c: char) -> Option<&[u64]> {
        if c.is_ascii() {
            let start = c as usize * self.words;
            Some(&self.ascii[start..start + self.words])
        } else {
            self.other.get(&c).map(Vec::as_slice)
        }
    }

    pub fn lcs(&self, text: &str) -> usize {
        if self.len == 0 {
            return 0;
        }
        if self.words == 1 {
            let mut v = !0u64;
            for c in text.chars() {
                if let Some(&[m]) = self.mask(c) {
                    let u = v & m;
                    v = v.wrapping_add(u) | (v & !m);
                }
            }
            let valid = if self.len == 64 { !0 } else { (1u64 << self.len) - 1 };
            return (!v & valid).count_ones() as usize;
        }
        let mut row = vec![!0u64; self.words];
        for c in text.chars() {
            let Some(mask) = self.mask(c) else {
                continue;
            };
            let mut carry = false;
            for (v, &m) in row.iter_mut().zip(mask) {
                let u = *v & m;
                let (sum, c1) = v.overflowing_add(u);
                let (sum, c2) = sum.overflowing_add(carry as u64);
                carry = c1 || c2;
                *v = sum | (*v & !m);
            }
        }
        let mut zeros = 0;
        for (w, v) in row.iter().enumerate() {
            let bits = (self.len - w * 64).min(64);
            let valid = if bits == 64 { !0 } else { (1u64 << bits) - 1 };
            zeros += (!v & valid).count_ones() as usize;
        }
        zeros
    }

    /// Indel distance from the pattern to `text`, plus the length of `text`.
    pub fn distance(&self, text: &str) -> (usize, usize) {
        let text_len = text.chars().count();
        (self.len + text_len - 2 * self.lcs(text), text_len)
    }

    pub fn ratio(&self, text: &str) -> u8 {
        let (d, text_len) = self.distance(text);
        ratio_from(self.len + text_len, d)
    }
}

/// Cheapest edit of `a` into `b` with insertions and deletions at cost 1 and
/// substitutions at cost 2.
pub fn edit_distance_sub2(a: &str, b: &str) -> usize {
    IndelMatcher::new(a).distance(b).0
}

/// `round_half_up(100 * (total - distance) / total)`; 100 when `total == 0`.
fn ratio_from(total: usize, distance: usize) -> u8 {
    if total == 0 {
        return 100;
    }
    ((200 * (total - distance) + total) / (2 * total)) as u8
}

/// Normalized similarity in `0..=100`.
pub fn similarity_ratio(a: &str, b: &str) -> u8 {
    IndelMatcher::new(a).ratio(b)
}

/// Whitespace tokens sorted by byte order and joined with single spaces.
pub fn sort_tokens(s: &str) -> String {
    let mut tokens: Vec<&str> = s.split_whitespace().collect();
    tokens.sort_unstable();
    tokens.join(" ")
}

/// [`similarity_ratio`] of the token-sorted forms of `a` and `b`.
pub fn token_sort_ratio(a: &str, b: &str) -> u8 {
    similarity_ratio(&sort_tokens(a), &sort_tokens(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(edit_distance_sub2("", "abc"), 3);
        assert_eq!(edit_distance_sub2("abc", ""), 3);
        assert_eq!(edit_distance_sub2("abc", "abc"), 0);
        assert_eq!(edit_distance_sub2("abc", "abd"), 2);
        assert_eq!(edit_distance_sub2("a b c", "a b"), 2);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(similarity_ratio("x", "x"), 100);
        assert_eq!(similarity_ratio("abc", "abd"), 67);
        assert_eq!(similarity_ratio("", ""), 100);
        assert_eq!(similarity_ratio("", "a"), 0);
    }

    #[test]
    fn ratio_rounds_half_up() {
        // L = 8, d = 6 -> 25.0; L = 40, d = 39 -> 2.5 -> 3
        assert_eq!(ratio_from(8, 6), 25);
        assert_eq!(ratio_from(40, 39), 3);
        assert_eq!(ratio_from(200, 1), 100);
        assert_eq!(ratio_from(200, 3), 99);
    }

    #[test]
    fn token_sort_examples() {
        assert_eq!(token_sort_ratio("b a", "a b"), 100);
        assert_eq!(token_sort_ratio("a b c", "a b"), 75);
        assert_eq!(token_sort_ratio("", "a"), 0);
        assert_eq!(token_sort_ratio("  a\tb ", "b a"), 100);
    }

    #[test]
    fn long_patterns_span_words() {
        let a: String = (0..150).map(|i| char::from(b'a' + (i % 7) as u8)).collect();
        let b: String = a.chars().rev().collect();
        let m = IndelMatcher::new(&a);
        assert_eq!(m.lcs(&a), 150);
        assert_eq!(m.distance(&a).0, 0);
        assert!(m.lcs(&b) < 150);
        assert_eq!(edit_distance_sub2(&a, &b), edit_distance_sub2(&b, &a));
    }

    #[test]
    fn non_ascii_counts_scalars() {
        assert_eq!(edit_distance_sub2("ñ", "n"), 2);
        assert_eq!(similarity_ratio("Álvaro", "Alvaro"), 83);
    }
}

//! Closure systems: lectic enumeration of closed sets and saturation of
//! attribute sets under implications.

use super::basis::Implication;
use super::bitset::AttributeSet;
use super::context::FormalContext;

/// The lectically next set closed under `closure_op` after `current`.
///
/// `current` must itself be closed under `closure_op`. Returns `None` once
/// `current` is the full attribute set. The lectic order is the one induced
/// by ascending attribute index. The first closed set of the enumeration is
/// `closure_op(∅)`, see [`first_closure`].
pub fn next_closure<F>(current: &AttributeSet, mut closure_op: F) -> Option<AttributeSet>
where
    F: FnMut(&AttributeSet) -> AttributeSet,
{
    let mut prefix = current.clone();
    for i in (0..current.universe()).rev() {
        if prefix.remove(i) {
            continue;
        }
        let mut candidate = prefix.clone();
        candidate.insert(i);
        let closed = closure_op(&candidate);
        if closed.agrees_below(&prefix, i) {
            return Some(closed);
        }
    }
    None
}

pub fn first_closure<F>(universe: usize, mut closure_op: F) -> AttributeSet
where
    F: FnMut(&AttributeSet) -> AttributeSet,
{
    closure_op(&AttributeSet::empty(universe))
}

/// Every intent of `ctx`, in lectic order.
pub fn intents(ctx: &FormalContext) -> impl Iterator<Item = AttributeSet> + '_ {
    let mut next = Some(first_closure(ctx.num_attributes(), |a| ctx.close(a)));
    std::iter::from_fn(move || {
        let current = next.take()?;
        next = next_closure(&current, |a| ctx.close(a));
        Some(current)
    })
}

/// Smallest superset of `attrs` respecting every implication in `basis`.
///
/// Plain fixpoint iteration; [`ImplicationIndex`] computes the same closure
/// with per-implication counters.
///
/// Panics if an implication lives over a different attribute universe.
pub fn implication_closure(attrs: &AttributeSet, basis: &[Implication]) -> AttributeSet {
    let mut result = attrs.clone();
    for imp in basis {
        assert_eq!(
            imp.premise.universe(),
            attrs.universe(),
            "implication universe mismatch"
        );
    }
    loop {
        let mut changed = false;
        for imp in basis {
            if imp.premise.is_subset(&result) && !imp.conclusion.is_subset(&result) {
                result.union_with(&imp.conclusion);
                changed = true;
            }
        }
        if !changed {
            return result;
        }
    }
}

/// Implications indexed by premise attribute for LinClosure-style
/// saturation. Grows incrementally as implications are pushed.
#[derive(Clone, Debug)]
pub struct ImplicationIndex {
    universe: usize,
    premise_len: Vec<usize>,
    conclusions: Vec<AttributeSet>,
    by_attribute: Vec<Vec<usize>>,
    /// Union of conclusions whose premise is empty.
    unconditional: AttributeSet,
}

impl ImplicationIndex {
    pub fn new(universe: usize) -> Self {
        ImplicationIndex {
            universe,
            premise_len: Vec::new(),
            conclusions: Vec::new(),
            by_attribute: vec![Vec::new(); universe],
            unconditional: AttributeSet::empty(universe),
        }
    }

    pub fn from_implications(universe: usize, basis: &[Implication]) -> Self {
        let mut index = Self::new(universe);
        for imp in basis {
            index.push(&imp.premise, &imp.conclusion);
        }
        index
    }

    pub fn len(&self) -> usize {
        self.premise_len.len()
    }

    pub fn is_empty(&self) -> bool {
        self.premise_len.is_empty()
    }

    pub fn push(&mut self, premise: &AttributeSet, conclusion: &AttributeSet) {
        assert_eq!(premise.universe(), self.universe);
        assert_eq!(conclusion.universe(), self.universe);
        let k = self.premise_len.len();
        let len = premise.len();
        if len == 0 {
            self.unconditional.union_with(conclusion);
        }
        for j in premise {
            self.by_attribute[j].push(k);
        }
        self.premise_len.push(len);
        self.conclusions.push(conclusion.clone());
    }

    pub fn close(&self, attrs: &AttributeSet) -> AttributeSet {
        self.close_guarded(attrs, 0).expect("no guard below 0")
    }

    /// Closure of `attrs`, or `None` as soon as it would add an attribute
    /// smaller than `bound`.
    pub(crate) fn close_guarded(&self, attrs: &AttributeSet, bound: usize) -> Option<AttributeSet> {
        let mut result = attrs.clone();
        let mut queue: Vec<usize> = result.iter().collect();
        for a in self.unconditional.difference(&result).iter() {
            if a < bound {
                return None;
            }
            result.insert(a);
            queue.push(a);
        }
        let mut pending = self.premise_len.clone();
        while let Some(m) = queue.pop() {
            for &k in &self.by_attribute[m] {
                pending[k] -= 1;
                if pending[k] == 0 {
                    for a in self.conclusions[k].difference(&result).iter() {
                        if a < bound {
                            return None;
                        }
                        result.insert(a);
                        queue.push(a);
                    }
                }
            }
        }
        Some(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fca::context::tests::{passing_toy, two_object_toy};

    fn set(n: usize, v: &[usize]) -> AttributeSet {
        AttributeSet::from_indices(n, v.iter().copied()).unwrap()
    }

    fn imp(n: usize, p: &[usize], c: &[usize]) -> Implication {
        Implication {
            premise: set(n, p),
            conclusion: set(n, c),
            support: 0,
        }
    }

    #[test]
    fn next_closure_terminates_after_full_set() {
        let ctx = two_object_toy();
        assert_eq!(next_closure(&AttributeSet::full(3), |a| ctx.close(a)), None);
    }

    #[test]
    fn successor_chain_of_two_object_toy() {
        let ctx = two_object_toy();
        let chain: Vec<_> = intents(&ctx).collect();
        assert_eq!(chain, vec![set(3, &[0]), set(3, &[0, 1]), set(3, &[0, 1, 2])]);
    }

    #[test]
    fn passing_toy_has_every_subset_closed() {
        let ctx = passing_toy();
        let chain: Vec<_> = intents(&ctx).collect();
        assert_eq!(chain.len(), 8);
        assert!(chain[0].is_empty());
        assert!(chain[7].is_full());
        for w in chain.windows(2) {
            assert!(w[0].lectic_cmp(&w[1]).is_lt());
        }
    }

    #[test]
    fn implication_closure_examples() {
        let basis = vec![imp(3, &[], &[0]), imp(3, &[0, 2], &[0, 1, 2])];
        assert_eq!(implication_closure(&set(3, &[2]), &basis), set(3, &[0, 1, 2]));
        assert_eq!(implication_closure(&set(3, &[1]), &[]), set(3, &[1]));
        assert_eq!(
            implication_closure(&set(3, &[]), &[imp(3, &[], &[0])]),
            set(3, &[0])
        );
    }

    #[test]
    fn index_matches_fixpoint_on_chained_rules() {
        let n = 5;
        let basis = vec![
            imp(n, &[0], &[0, 1]),
            imp(n, &[1, 2], &[1, 2, 3]),
            imp(n, &[3], &[3, 4]),
            imp(n, &[], &[2]),
        ];
        let index = ImplicationIndex::from_implications(n, &basis);
        for bits in 0u32..(1 << n) {
            let a = set(n, &(0..n).filter(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
            assert_eq!(index.close(&a), implication_closure(&a, &basis), "{a:?}");
        }
    }
}

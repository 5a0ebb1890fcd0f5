//! The Duquenne-Guigues canonical basis.

use super::bitset::AttributeSet;
use super::closure::ImplicationIndex;
use super::context::FormalContext;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// `premise -> conclusion`, with the conclusion stored as the full closure
/// of the premise (so `premise ⊆ conclusion`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Implication {
    pub premise: AttributeSet,
    pub conclusion: AttributeSet,
    /// Objects whose row contains the premise.
    pub support: usize,
}

impl Implication {
    /// Conclusion attributes not already in the premise.
    pub fn consequence(&self) -> AttributeSet {
        self.conclusion.difference(&self.premise)
    }

    /// True when every object having the premise also has the conclusion.
    pub fn holds_in(&self, ctx: &FormalContext) -> bool {
        (0..ctx.num_objects()).all(|g| {
            let row = ctx.row(g);
            !self.premise.is_subset(row) || self.conclusion.is_subset(row)
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImplicationBasis {
    /// In the lectic order in which their premises were found.
    pub implications: Vec<Implication>,
    pub context_id: String,
}

impl ImplicationBasis {
    pub fn with_context_id(mut self, id: impl Into<String>) -> Self {
        self.context_id = id.into();
        self
    }

    pub fn len(&self) -> usize {
        self.implications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.implications.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Implication> {
        self.implications.iter()
    }
}

/// Computes the canonical basis of `ctx`: one implication `P -> P''` per
/// pseudo-intent `P`, in lectic order of `P`.
///
/// NextClosure runs over the closure operator of the implications found so
/// far. When the new conclusion only adds attributes above the one that
/// produced the current premise, the enumeration jumps straight to it
/// (Bazhanov and Obiedkov's variant of Ganter's algorithm).
pub fn canonical_basis(ctx: &FormalContext) -> ImplicationBasis {
    let n = ctx.num_attributes();
    let mut implications = Vec::new();
    let mut index = ImplicationIndex::new(n);

    let mut current = AttributeSet::empty(n);
    // attribute whose insertion produced `current`; 0 forces the initial jump
    let mut pivot = 0;
    loop {
        let closed = ctx.close(&current);
        let jump = closed.difference(&current).min().is_none_or(|m| m >= pivot);
        if closed != current {
            index.push(&current, &closed);
            implications.push(Implication {
                premise: current.clone(),
                conclusion: closed.clone(),
                support: ctx.support_of(&current),
            });
        }

        let upper = if jump {
            current = closed;
            if current.is_full() {
                break;
            }
            n
        } else {
            current.retain_below(pivot);
            pivot
        };

        let mut found = None;
        for j in (0..upper).rev() {
            if current.remove(j) {
                continue;
            }
            let mut candidate = current.clone();
            candidate.insert(j);
            // `current` holds only attributes below `j` here, so the step is
            // valid exactly when the closure adds nothing below `j`
            if let Some(next) = index.close_guarded(&candidate, j) {
                found = Some((next, j));
                break;
            }
        }
        match found {
            Some((next, j)) => {
                current = next;
                pivot = j;
            }
            None => break,
        }
    }

    ImplicationBasis {
        implications,
        context_id: String::new(),
    }
}

/// Canonical bases for a batch of contexts, in input order.
pub fn canonical_bases(contexts: &[FormalContext], exec: Execution) -> Vec<ImplicationBasis> {
    exec.map(contexts, canonical_basis)
}

/// Keeps implications with `support >= min_support`, preserving order.
pub fn filter_support(basis: &ImplicationBasis, min_support: usize) -> Result<ImplicationBasis> {
    if min_support == 0 {
        return Err(Error::invalid(
            "min_support must be at least 1; 0 would keep everything",
        ));
    }
    Ok(ImplicationBasis {
        implications: basis
            .implications
            .iter()
            .filter(|imp| imp.support >= min_support)
            .cloned()
            .collect(),
        context_id: basis.context_id.clone(),
    })
}

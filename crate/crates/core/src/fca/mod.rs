//! Formal contexts, derivation and closure operators, lectic enumeration and
//! the canonical (Duquenne-Guigues) implication basis.

mod basis;
mod bitset;
mod closure;
mod context;
pub mod io;

pub use basis::{canonical_basis, canonical_bases, filter_support, Implication, ImplicationBasis};
pub use bitset::{AttributeSet, BitSet, ObjectSet};
pub use closure::{first_closure, implication_closure, intents, next_closure, ImplicationIndex};
pub use context::FormalContext;

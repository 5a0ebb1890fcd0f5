mod common;

use common::{mask_of, set_of, Table};
use passfca::fca::{
    canonical_basis, implication_closure, intents, AttributeSet, FormalContext, ImplicationIndex,
    ObjectSet,
};
use proptest::prelude::*;

fn table_strategy(max_g: usize, max_m: usize) -> impl Strategy<Value = Table> {
    (0..=max_g, 0..=max_m).prop_flat_map(|(g, m)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), m), g).prop_map(
            move |rows| Table {
                rows,
                num_attributes: m,
            },
        )
    })
}

fn subsets(m: usize) -> impl Iterator<Item = AttributeSet> {
    (0u32..1 << m).map(move |mask| set_of(m, mask))
}

proptest! {
    #[test]
    fn basis_premises_are_the_pseudo_intents(t in table_strategy(8, 6)) {
        let ctx = t.context();
        let basis = canonical_basis(&ctx);
        let mut got: Vec<(u32, u32)> = basis
            .iter()
            .map(|imp| (mask_of(&imp.premise), mask_of(&imp.conclusion)))
            .collect();
        got.sort_unstable();
        let mut want: Vec<(u32, u32)> = t.pseudo_intents().into_iter().map(|p| (p, t.closure(p))).collect();
        want.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn basis_is_sound_and_complete(t in table_strategy(10, 8)) {
        let ctx = t.context();
        let basis = canonical_basis(&ctx);
        for imp in basis.iter() {
            prop_assert!(imp.holds_in(&ctx));
            prop_assert!(imp.premise.is_subset(&imp.conclusion));
            prop_assert_eq!(imp.support, t.extent_size(mask_of(&imp.premise)));
            prop_assert_eq!(imp.support, t.extent_size(mask_of(&imp.conclusion)));
        }
        let index = ImplicationIndex::from_implications(ctx.num_attributes(), &basis.implications);
        for a in subsets(ctx.num_attributes()) {
            let want = ctx.closure(&a).unwrap();
            prop_assert_eq!(&implication_closure(&a, &basis.implications), &want);
            prop_assert_eq!(&index.close(&a), &want);
        }
    }

    #[test]
    fn premises_unique_and_lectically_increasing(t in table_strategy(10, 8)) {
        let basis = canonical_basis(&t.context());
        for w in basis.implications.windows(2) {
            prop_assert!(w[0].premise.lectic_cmp(&w[1].premise).is_lt());
        }
    }

    #[test]
    fn removing_any_implication_loses_completeness(t in table_strategy(8, 6)) {
        let ctx = t.context();
        let basis = canonical_basis(&ctx);
        for skip in 0..basis.len() {
            let rest: Vec<_> = basis.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| x.clone()).collect();
            let p = &basis.implications[skip].premise;
            prop_assert_ne!(implication_closure(p, &rest), ctx.closure(p).unwrap());
        }
    }

    #[test]
    fn closure_is_a_closure_operator(t in table_strategy(10, 7), a in any::<u32>(), b in any::<u32>()) {
        let ctx = t.context();
        let m = ctx.num_attributes();
        let full = if m == 0 { 0 } else { t.full_mask() };
        let a = set_of(m, a & full);
        let mut ab = a.clone();
        ab.union_with(&set_of(m, b & full));
        let ca = ctx.closure(&a).unwrap();
        prop_assert!(a.is_subset(&ca));
        prop_assert!(ca.is_subset(&ctx.closure(&ab).unwrap()));
        prop_assert_eq!(ctx.closure(&ca).unwrap(), ca.clone());
        prop_assert_eq!(mask_of(&ca), t.closure(mask_of(&a)));
    }

    #[test]
    fn derivations_form_a_galois_connection(t in table_strategy(10, 7), objs in any::<u32>(), attrs in any::<u32>()) {
        let ctx = t.context();
        let (g, m) = (ctx.num_objects(), ctx.num_attributes());
        let objs = ObjectSet::from_indices(g, (0..g).filter(|i| objs >> i & 1 == 1)).unwrap();
        let attrs = set_of(m, if m == 0 { 0 } else { attrs & t.full_mask() });
        let left = attrs.is_subset(&ctx.derive_attributes(&objs).unwrap());
        let right = objs.is_subset(&ctx.derive_objects(&attrs).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn intents_enumerates_every_closed_set_in_lectic_order(t in table_strategy(8, 7)) {
        let ctx = t.context();
        let got: Vec<AttributeSet> = intents(&ctx).collect();
        let mut want: Vec<AttributeSet> = subsets(ctx.num_attributes())
            .filter(|a| mask_of(a) == t.closure(mask_of(a)))
            .collect();
        want.sort_by(|x, y| x.lectic_cmp(y));
        prop_assert_eq!(got, want);
    }
}

#[test]
fn wide_context_crosses_word_boundaries() {
    // 150 attributes force multi-word bit sets in every operation.
    let m = 150;
    let rows: Vec<Vec<bool>> = (0..6)
        .map(|g| (0..m).map(|j| (j * 7 + g * 13) % 5 != 0 && (j + g) % 11 != 0).collect())
        .collect();
    let ctx = FormalContext::new(
        (0..6).map(|g| format!("g{g}")).collect(),
        (0..m).map(|j| format!("m{j}")).collect(),
        &rows,
    )
    .unwrap();
    let basis = canonical_basis(&ctx);
    assert!(!basis.is_empty());
    for imp in basis.iter() {
        assert!(imp.holds_in(&ctx));
        assert_eq!(implication_closure(&imp.premise, &basis.implications), imp.conclusion);
    }
    // intents are exactly the sets the basis leaves fixed
    for intent in intents(&ctx) {
        assert_eq!(implication_closure(&intent, &basis.implications), intent);
    }
}

mod common;

use multinorm::kummer::{
    common_intersection_exponent, equivalence_structure, field_degree_exponent, intersection_exponent,
    validate_and_normalize, KummerFamily,
};
use proptest::prelude::*;

/// `(p, n)` with `p^n <= 81`.
fn level() -> impl Strategy<Value = (u64, u32)> {
    prop::sample::select(vec![
        (2u64, 1u32),
        (2, 2),
        (2, 3),
        (2, 4),
        (2, 5),
        (2, 6),
        (3, 1),
        (3, 2),
        (3, 3),
        (3, 4),
        (5, 1),
        (5, 2),
        (7, 1),
        (7, 2),
    ])
}

fn family() -> impl Strategy<Value = KummerFamily> {
    level().prop_flat_map(|(p, n)| {
        let q = p.pow(n);
        prop::collection::vec([0..q, 0..q], 1..6)
            .prop_map(move |vs| KummerFamily::new(p, n, if p == 2 { (3, 5) } else { (2, 11) }, vs))
    })
}

fn valid_family() -> impl Strategy<Value = KummerFamily> {
    family().prop_filter("valid", |f| validate_and_normalize(f).is_ok())
}

proptest! {
    #[test]
    fn closed_form_matches_enumeration(f in family()) {
        let q = f.modulus();
        for i in 0..f.len() {
            for j in 0..f.len() {
                let e = intersection_exponent(&f, i, j).unwrap();
                prop_assert_eq!(e, common::brute_intersection_exponent(f.p, q, f.vectors[i], f.vectors[j]));
                prop_assert_eq!(e, intersection_exponent(&f, j, i).unwrap());
                let bound = field_degree_exponent(&f, i).unwrap().min(field_degree_exponent(&f, j).unwrap());
                prop_assert!(e <= bound);
            }
        }
        prop_assert_eq!(common_intersection_exponent(&f), common::brute_common_exponent(f.p, q, &f.vectors));
    }

    #[test]
    fn relation_is_transitive_and_monotone(f in valid_family()) {
        let st = equivalence_structure(&validate_and_normalize(&f).unwrap().family).unwrap();
        prop_assert!(st.non_transitive.is_empty());
        let covered: usize = st.u_partition.values().map(Vec::len).sum();
        prop_assert_eq!(covered, f.len() - 1);
        for &r in &st.r_set {
            let u = st.u(r);
            for l in 0..st.n + 1 {
                prop_assert!(st.class_count(u, l) <= st.class_count(u, l + 1));
            }
            for layer in &st.layers[&r] {
                for c in &layer.classes {
                    prop_assert!(c.level >= layer.l || c.members.len() == 1);
                    prop_assert!(c.refinement_count >= 1);
                }
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(f in valid_family()) {
        let once = validate_and_normalize(&f).unwrap();
        let twice = validate_and_normalize(&once.family).unwrap();
        prop_assert_eq!(&twice.family, &once.family);
        prop_assert_eq!(twice.permutation, (0..f.len()).collect::<Vec<_>>());
        let mut sorted = once.permutation.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..f.len()).collect::<Vec<_>>());
        for (new, &old) in once.permutation.iter().enumerate() {
            prop_assert_eq!(once.family.vectors[new], f.vectors[old]);
        }
    }
}

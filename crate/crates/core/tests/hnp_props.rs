use multinorm::hnp::{
    decide_hnp, validate_verdict, ClosureGroup, FieldProfile, IntersectionProfile, MultiFieldFacts, PrimeFamilyFacts,
    SplitKind, SplitWitness,
};
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = FieldProfile> {
    (2u64..12, 0u8..6, prop::option::of(any::<bool>())).prop_map(|(n, kind, sha3)| match kind {
        0 => FieldProfile { sha3_trivial: sha3.map(|_| true), ..FieldProfile::cyclic(n) },
        1 => FieldProfile {
            is_cyclic: false,
            closure_group: ClosureGroup::Other("abelian".into()),
            sha3_trivial: sha3,
            ..FieldProfile::cyclic(n)
        },
        2 => FieldProfile::with_closure(n, ClosureGroup::Dihedral),
        3 if n >= 3 => FieldProfile::with_closure(n, ClosureGroup::Symmetric),
        4 if n >= 4 => FieldProfile::with_closure(n, ClosureGroup::Alternating),
        _ => FieldProfile::with_closure(n, ClosureGroup::Other("G".into())),
    })
}

fn facts(r: usize) -> impl Strategy<Value = MultiFieldFacts> {
    (
        prop::option::of(any::<bool>()),
        prop::option::of((prop::option::of(any::<bool>()), prop::option::of(any::<bool>()))),
        prop::option::of((1..r.max(2), any::<bool>())),
        prop::option::of((prop::sample::select(vec![2u64, 3, 5, 4]), any::<bool>(), any::<bool>(), any::<bool>())),
    )
        .prop_map(move |(disjoint, inter, split, prime)| MultiFieldFacts {
            pairwise_closure_disjoint: disjoint,
            intersection: inter.map(|(s, w)| IntersectionProfile {
                // Sha_ω(F) = 0 forces Sha(F) = 0.
                sha_trivial: if w == Some(true) { s.map(|_| true) } else { s },
                sha_omega_trivial: w,
            }),
            split: split.filter(|_| r >= 2).map(|(i, b)| SplitWitness {
                index: i,
                kind: if b { SplitKind::Base } else { SplitKind::Intersection },
            }),
            prime_family: prime.map(|(p, distinct, big, local)| PrimeFamilyFacts {
                p,
                fields_distinct: distinct,
                compositum_degree_exceeds_p2: big,
                some_local_degree_exceeds_p: local,
                some_factor_cyclic: false,
            }),
        })
}

fn instance() -> impl Strategy<Value = (Vec<FieldProfile>, MultiFieldFacts)> {
    prop::collection::vec(profile(), 1..5).prop_flat_map(|ps| {
        let r = ps.len();
        let any_cyclic = ps.iter().any(|p| p.is_cyclic);
        (Just(ps), facts(r)).prop_map(move |(ps, mut f)| {
            if let Some(pf) = &mut f.prime_family {
                pf.some_factor_cyclic = any_cyclic;
            }
            (ps, f)
        })
    })
}

/// Drops one optional fact, chosen by `k`.
fn weaken(f: &MultiFieldFacts, k: u8) -> MultiFieldFacts {
    let mut g = f.clone();
    match k % 4 {
        0 => g.pairwise_closure_disjoint = None,
        1 => g.intersection = None,
        2 => g.split = None,
        _ => g.prime_family = None,
    }
    g
}

proptest! {
    #[test]
    fn verdicts_pass_the_validator((ps, f) in instance()) {
        let v = decide_hnp(&ps, &f).unwrap();
        prop_assert!(validate_verdict(&ps, &f, &v).is_ok(), "{:?}", v);
    }

    #[test]
    fn more_facts_never_lose_a_verdict((ps, f) in instance(), k in any::<u8>()) {
        let weak = weaken(&f, k);
        let vw = decide_hnp(&ps, &weak).unwrap();
        let vs = decide_hnp(&ps, &f).unwrap();
        if vw.holds() {
            prop_assert!(vs.holds());
        }
    }
}

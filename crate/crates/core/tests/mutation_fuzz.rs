mod common;

use std::sync::Arc;

use code_critters::blocklang::*;
use code_critters::mutation::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn every_enumerated_mutation_is_a_real_change(p in common::program()) {
        for m in enumerate_mutations(&p, &MutationClass::ALL) {
            let mutated = apply(&p, &m).unwrap();
            prop_assert!(typecheck(&mutated).is_empty(), "{m:?}");
            prop_assert_ne!(&mutated, &p);
        }
    }

    #[test]
    fn classes_filter(p in common::program()) {
        for class in MutationClass::ALL {
            for m in enumerate_mutations(&p, &[class]) {
                prop_assert_eq!(m.class, class);
            }
        }
    }

    #[test]
    fn mutant_ids_ignore_mutation_order(p in common::program()) {
        let ms = enumerate_mutations(&p, &MutationClass::ALL);
        let base = Arc::new(p);
        // First two mutations whose paths do not overlap.
        let pair = ms.iter().enumerate().find_map(|(i, a)| {
            ms[i + 1..]
                .iter()
                .find(|b| !a.path.is_prefix_of(&b.path) && !b.path.is_prefix_of(&a.path))
                .map(|b| (a.clone(), b.clone()))
        });
        if let Some((a, b)) = pair {
            if let (Ok(ab), Ok(ba)) = (
                make_mutant(base.clone(), vec![a.clone(), b.clone()]),
                make_mutant(base.clone(), vec![b, a]),
            ) {
                prop_assert_eq!(&ab.id, &ba.id);
                prop_assert_eq!(&ab.program, &ba.program);
                prop_assert_eq!(replay(&base, &explain(&ab)).unwrap(), ab.program);
            }
        }
    }

    #[test]
    fn mutation_documents_round_trip(p in common::program()) {
        let ms = enumerate_mutations(&p, &MutationClass::ALL);
        let back: Vec<Mutation> = from_json(&to_json(&ms)).unwrap();
        prop_assert_eq!(back, ms);
    }
}

#[test]
fn shirt_cut_catalog() {
    let cut = common::tutorial().cut;
    assert_eq!(enumerate_mutations(&cut, &[MutationClass::Initialization]).len(), Color::ALL.len() - 1);
}
